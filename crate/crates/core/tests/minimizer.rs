use yamabe_cone::geometry::sphere_volume;
use yamabe_cone::variational::{closed_form_line, minimize_line};
use yamabe_cone::{LineProblem, MinimizeOptions, MinimizeResult};

fn solve(n: usize, half_width: f64, grid: usize, opts: &MinimizeOptions) -> MinimizeResult {
    let pb = LineProblem::normalized(n, sphere_volume(n).unwrap(), half_width, grid).unwrap();
    minimize_line(&pb, opts).unwrap()
}

#[test]
fn minimizer_has_cosh_shape() {
    for n in 2..=5 {
        let res = solve(n, 12.0, 4001, &MinimizeOptions::default());
        let f = &res.minimizer;
        let (peak_i, peak) = f.values.iter().enumerate().fold((0, 0.0), |m, (i, &v)| if v > m.1 { (i, v) } else { m });
        let center = f.x[peak_i];
        let k = (n as f64 - 1.0) / 2.0;
        let err = f
            .x
            .iter()
            .zip(&f.values)
            .map(|(&x, &v)| (v / peak - (x - center).cosh().powf(-k)).abs())
            .fold(0.0, f64::max);
        assert!(err < 0.01, "n = {n}: sup error {err}");
    }
}

#[test]
fn value_is_stable_under_refinement_and_domain() {
    let opts = MinimizeOptions::default();
    for n in [2, 4] {
        let coarse = solve(n, 12.0, 4001, &opts).value;
        let fine = solve(n, 12.0, 8001, &opts).value;
        let wide = solve(n, 14.0, 4667, &opts).value;
        assert!((coarse - fine).abs() / fine < 5e-4, "n = {n}: {coarse} vs {fine}");
        assert!((coarse - wide).abs() / wide < 5e-4, "n = {n}: {coarse} vs {wide}");
    }
}

#[test]
fn shifted_start_reaches_the_same_value() {
    let centered = MinimizeOptions { symmetrize: false, ..Default::default() };
    let shifted = MinimizeOptions { symmetrize: false, initial_shift: 1.5, ..Default::default() };
    for n in [3, 4] {
        let a = solve(n, 12.0, 2001, &centered).value;
        let b = solve(n, 12.0, 2001, &shifted).value;
        assert!((a - b).abs() / a < 1e-3, "n = {n}: {a} vs {b}");
    }
}

#[test]
fn value_does_not_undercut_closed_form() {
    for n in 2..=6 {
        let res = solve(n, 12.0, 4001, &MinimizeOptions::default());
        let exact = closed_form_line(n, sphere_volume(n).unwrap()).unwrap();
        assert!(res.value >= exact * (1.0 - 1e-4), "n = {n}: {} < {exact}", res.value);
        assert!(res.history.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0]));
    }
}
