use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spraycard::raster::{
    binarize, contour_mask, dilate, erode, to_grayscale, BinaryImage, GrayImage, RgbImage, StructuringElement,
};

/// Reference dilation/erosion: scan the full window around every pixel.
fn brute_force(img: &BinaryImage, side: u32, any: bool) -> BinaryImage {
    let r = i64::from(side / 2);
    let (w, h) = img.dimensions();
    BinaryImage::from_fn(w, h, |x, y| {
        let mut hits = 0;
        let mut total = 0;
        for dy in -r..=r {
            for dx in -r..=r {
                let nx = i64::from(x) + dx;
                let ny = i64::from(y) + dy;
                total += 1;
                if nx >= 0 && ny >= 0 && nx < i64::from(w) && ny < i64::from(h) && img.get(nx as u32, ny as u32) {
                    hits += 1;
                }
            }
        }
        if any {
            hits > 0
        } else {
            hits == total
        }
    })
    .unwrap()
}

fn random_binary(rng: &mut ChaCha8Rng, w: u32, h: u32, density: f64) -> BinaryImage {
    BinaryImage::from_fn(w, h, |_, _| rng.random_bool(density)).unwrap()
}

#[test]
fn morphology_matches_brute_force_on_random_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..100 {
        let density = [0.1, 0.3, 0.5, 0.7, 0.9][i % 5];
        let img = random_binary(&mut rng, 32, 32, density);
        for side in [3, 5] {
            let se = StructuringElement::square(side).unwrap();
            let d = dilate(&img, se);
            let e = erode(&img, se);
            assert_eq!(d, brute_force(&img, side, true), "dilate image {i} side {side}");
            assert_eq!(e, brute_force(&img, side, false), "erode image {i} side {side}");
            let ring = contour_mask(&d, &e).unwrap();
            let expected =
                BinaryImage::from_fn(32, 32, |x, y| d.get(x, y) && !e.get(x, y)).unwrap();
            assert_eq!(ring, expected, "contour image {i} side {side}");
        }
    }
}

#[test]
fn non_square_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (w, h) in [(1, 1), (1, 9), (9, 1), (2, 17), (31, 4)] {
        let img = random_binary(&mut rng, w, h, 0.6);
        for side in [1, 3, 5, 7] {
            let se = StructuringElement::square(side).unwrap();
            assert_eq!(dilate(&img, se), brute_force(&img, side, true));
            assert_eq!(erode(&img, se), brute_force(&img, side, false));
        }
    }
}

fn binary_strategy(max: u32) -> impl Strategy<Value = BinaryImage> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<bool>(), (w * h) as usize)
            .prop_map(move |px| BinaryImage::new(w, h, px).unwrap())
    })
}

proptest! {
    #[test]
    fn erosion_inside_image_inside_dilation(img in binary_strategy(24), side in prop::sample::select(vec![1u32, 3, 5])) {
        let se = StructuringElement::square(side).unwrap();
        prop_assert!(erode(&img, se).is_subset_of(&img));
        prop_assert!(img.is_subset_of(&dilate(&img, se)));
    }

    #[test]
    fn duality_away_from_border(img in binary_strategy(20)) {
        // Embed the random pattern in a frame of background wide enough that
        // the border convention never matters.
        let se = StructuringElement::default();
        let pad = 4;
        let (w, h) = img.dimensions();
        let framed = BinaryImage::from_fn(w + 2 * pad, h + 2 * pad, |x, y| {
            x >= pad && y >= pad && x < w + pad && y < h + pad && img.get(x - pad, y - pad)
        }).unwrap();
        let lhs = dilate(&framed.not(), se);
        let rhs = erode(&framed, se).not();
        for y in 2..h + 2 * pad - 2 {
            for x in 2..w + 2 * pad - 2 {
                prop_assert_eq!(lhs.get(x, y), rhs.get(x, y));
            }
        }
    }

    #[test]
    fn grayscale_stays_in_unit_range(px in proptest::collection::vec(prop::array::uniform3(0.0f64..=1.0), 1..64)) {
        let n = px.len() as u32;
        let g = to_grayscale(&RgbImage::new(n, 1, px).unwrap());
        prop_assert!(g.pixels().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn binarize_is_idempotent(values in proptest::collection::vec(0.0f64..=1.0, 1..64), t in 0.01f64..0.99) {
        let n = values.len() as u32;
        let b = binarize(&GrayImage::new(n, 1, values).unwrap(), t).unwrap();
        let back = GrayImage::new(n, 1, b.pixels().iter().map(|&p| if p { 0.0 } else { 1.0 }).collect()).unwrap();
        prop_assert_eq!(binarize(&back, t).unwrap(), b);
    }
}
