use spraycard::pipeline::{analyze_rgb, PipelineConfig};
use spraycard::synthcard::{control_card_layout, grid_layout, render, Region, SynthSpec};

const CARD_W: f64 = 76_000.0;
const CARD_H: f64 = 26_000.0;

fn grid_card(diameter: f64, count: usize, spacing: f64, dpi: f64) -> SynthSpec {
    let drops = grid_layout(Region::whole_card(CARD_W, CARD_H), dpi, diameter, count, spacing).unwrap();
    SynthSpec::new(CARD_W, CARD_H, dpi, drops)
}

#[test]
fn isolated_drops_are_recovered_exactly() {
    for (diameter, spacing) in [(50.0, 600.0), (250.0, 1500.0), (1000.0, 3000.0)] {
        let spec = grid_card(diameter, 20, spacing, 600.0);
        let (img, truth) = render(&spec).unwrap();
        let a = analyze_rgb(&img, CARD_W, CARD_H, &PipelineConfig::default()).unwrap();
        assert_eq!(a.report.drop_count, 20, "{diameter} um");
        // Measured areas are the rasterized disks, matched by position.
        for s in &a.segmentation.segments {
            let t = truth
                .drops
                .iter()
                .min_by(|p, q| {
                    let dp = (p.center_px.0 - s.centroid.0).hypot(p.center_px.1 - s.centroid.1);
                    let dq = (q.center_px.0 - s.centroid.0).hypot(q.center_px.1 - s.centroid.1);
                    dp.total_cmp(&dq)
                })
                .unwrap();
            assert_eq!(s.area_px, t.area_px, "{diameter} um drop at {:?}", s.centroid);
            assert!((s.centroid.0 - t.center_px.0).abs() < 0.5 && (s.centroid.1 - t.center_px.1).abs() < 0.5);
        }
    }
}

#[test]
fn diameter_error_shrinks_with_resolution_and_size() {
    let mean_error = |diameter: f64, dpi: f64| {
        let spec = grid_card(diameter, 20, 3.0 * diameter + 8.0 * 25_400.0 / dpi, dpi);
        let (img, _) = render(&spec).unwrap();
        let r = analyze_rgb(&img, CARD_W, CARD_H, &PipelineConfig::default()).unwrap().report;
        assert_eq!(r.drop_count, 20);
        let mean = r.drops.iter().map(|d| d.diameter_um).sum::<f64>() / 20.0;
        (mean - diameter).abs() / diameter
    };
    assert!(mean_error(1000.0, 600.0) <= 0.02);
    assert!(mean_error(1000.0, 1200.0) <= mean_error(1000.0, 300.0));
    let by_size: Vec<f64> = [50.0, 250.0, 1000.0].iter().map(|&d| mean_error(d, 600.0)).collect();
    assert!(by_size[0] > by_size[1] && by_size[1] > by_size[2], "{by_size:?}");
}

#[test]
fn control_card_recovers_every_band() {
    let drops = control_card_layout(CARD_W, CARD_H, 600.0, 12).unwrap();
    let (img, _) = render(&SynthSpec::new(CARD_W, CARD_H, 600.0, drops)).unwrap();
    let r = analyze_rgb(&img, CARD_W, CARD_H, &PipelineConfig::default()).unwrap().report;
    assert_eq!(r.drop_count, 60);
}

#[test]
fn rendering_is_deterministic() {
    let mut spec = grid_card(500.0, 30, 2000.0, 600.0);
    spec.noise_sigma = 0.03;
    spec.rng_seed = 11;
    assert_eq!(render(&spec).unwrap(), render(&spec).unwrap());
}

#[test]
fn mild_noise_keeps_counts() {
    let mut spec = grid_card(500.0, 30, 2000.0, 600.0);
    spec.noise_sigma = 0.03;
    spec.rng_seed = 5;
    let (img, _) = render(&spec).unwrap();
    let r = analyze_rgb(&img, CARD_W, CARD_H, &PipelineConfig::default()).unwrap().report;
    assert_eq!(r.drop_count, 30);
}

#[test]
fn coverage_matches_analytic_disk_area() {
    for (diameter, count, spacing) in [(1000.0, 60, 2400.0), (250.0, 200, 1000.0), (500.0, 100, 1500.0)] {
        let spec = grid_card(diameter, count, spacing, 600.0);
        let expected = spec.analytic_coverage_pct();
        assert!(expected <= 15.0);
        let (img, _) = render(&spec).unwrap();
        let r = analyze_rgb(&img, CARD_W, CARD_H, &PipelineConfig::default()).unwrap().report;
        assert!((r.coverage_density_pct - expected).abs() <= 1.0, "{} vs {expected}", r.coverage_density_pct);
    }
}
