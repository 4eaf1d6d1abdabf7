use tsablate_demo::ops::{backtest, decompose, perturb, synthetic_series};

#[test]
fn synthetic_series_is_reproducible() {
    assert_eq!(synthetic_series(200, 24.0, 0.3, 5), synthetic_series(200, 24.0, 0.3, 5));
    assert_ne!(synthetic_series(200, 24.0, 0.3, 5), synthetic_series(200, 24.0, 0.3, 6));
}

#[test]
fn parts_sum_to_series() {
    let x = synthetic_series(300, 24.0, 0.3, 1);
    let p = decompose(&x, 25, 7).unwrap();
    for (i, v) in x.iter().enumerate() {
        assert!((p.trend[i] + p.seasonal[i] + p.residual[i] - v).abs() < 1e-12);
    }
    assert!(decompose(&x, 7, 25).is_err());
    assert!(decompose(&[], 25, 7).is_err());
}

#[test]
fn shuffles_keep_values() {
    let x = synthetic_series(96, 24.0, 0.3, 2);
    let mut sorted = x.clone();
    sorted.sort_by(f64::total_cmp);
    for kind in ["sf-all", "sf-half", "ex-half"] {
        let mut y = perturb(&x, kind, 3).unwrap();
        y.sort_by(f64::total_cmp);
        assert_eq!(y, sorted, "{kind}");
    }
    let masked = perturb(&x, "masking:0.25", 3).unwrap();
    assert_eq!(masked.iter().filter(|v| **v == 0.0).count(), 24);
    assert!(perturb(&x, "reverse", 3).is_err());
}

#[test]
fn seasonal_beats_mean_on_periodic_data() {
    let x = synthetic_series(24 * 40, 24.0, 0.05, 4);
    let mean = backtest(&x, 96, 24, "meanp", 24, 0).unwrap();
    let seasonal = backtest(&x, 96, 24, "seasonal", 24, 0).unwrap();
    assert!(seasonal.mse < mean.mse);
    for b in [&mean, &seasonal] {
        assert_eq!(b.forecast.len(), 24);
        assert!(b.mse_lower <= b.mse && b.mse <= b.mse_upper);
        assert_eq!(b.windows, (x.len() - 96 - 24) / 24 + 1);
    }
    assert!(backtest(&x[..50], 96, 24, "meanp", 24, 0).is_err());
    assert!(backtest(&x, 96, 24, "arima", 24, 0).is_err());
}
