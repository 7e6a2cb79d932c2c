use relfrac_core::fit::fit_line;
use relfrac_core::grid::{translate, GridField, GridSpec};
use relfrac_core::operator::{apply_fourier, apply_singular_integral, CoreTreatment, SingularQuadratureConfig};

fn gaussian(g: GridSpec) -> GridField {
    let d = g.dim();
    GridField::from_fn(g, |x| (-0.5 * x[..d].iter().map(|v| v * v).sum::<f64>()).exp()).unwrap()
}

fn bump(g: GridSpec) -> GridField {
    let d = g.dim();
    GridField::from_fn(g, |x| {
        let r2: f64 = x[..d].iter().map(|v| v * v).sum();
        (1.0 + 0.3 * x[0]) * (-r2 / 1.5).exp() / (1.0 + r2)
    })
    .unwrap()
}

fn discrepancy(u: &GridField, m: f64, s: f64, core: CoreTreatment) -> f64 {
    let f = apply_fourier(u, m, s).unwrap();
    let cfg = SingularQuadratureConfig::for_grid(u.spec()).with_core(core);
    apply_singular_integral(u, m, s, &cfg).unwrap().relative_l2_error(&f)
}

// the box must hold the kernel tail e^{−mL}; L = 20 leaves a 1e−6 floor at m = 0.5
fn half_width(dim: usize, m: f64) -> f64 {
    match dim {
        1 => 20.0_f64.max(20.0 / m),
        _ => (16.0 / m).min(16.0),
    }
}

#[test]
fn corrected_core_equivalence_sweep() {
    for dim in [1usize, 2] {
        let (n, fine) = if dim == 1 { (1024, 2048) } else { (256, 512) };
        for s in [0.25, 0.3, 0.5] {
            for m in [0.5, 1.0, 2.0] {
                let l = half_width(dim, m);
                for make in [gaussian as fn(GridSpec) -> GridField, bump] {
                    let coarse = discrepancy(&make(GridSpec::new(dim, l, n).unwrap()), m, s, CoreTreatment::LatticeZeta);
                    assert!(coarse <= 1e-3, "N={dim} s={s} m={m}: {coarse:e}");
                    if dim == 1 || m >= 1.0 {
                        let refined =
                            discrepancy(&make(GridSpec::new(dim, l, fine).unwrap()), m, s, CoreTreatment::LatticeZeta);
                        assert!(refined < coarse, "N={dim} s={s} m={m}: {refined:e} vs {coarse:e}");
                    }
                }
            }
        }
    }
}

#[test]
fn dropped_core_converges_at_the_core_order() {
    // dropping the core costs O(h^{2−2s})
    for s in [0.25, 0.3, 0.5] {
        let errs: Vec<f64> = [512, 1024, 2048]
            .iter()
            .map(|&n| discrepancy(&gaussian(GridSpec::new(1, 20.0, n).unwrap()), 1.0, s, CoreTreatment::Drop))
            .collect();
        let order = (errs[1] / errs[2]).log2();
        assert!((order - (2.0 - 2.0 * s)).abs() < 0.05, "s={s} order={order}");
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
    }
    let e = discrepancy(&gaussian(GridSpec::new(1, 20.0, 1024).unwrap()), 1.0, 0.3, CoreTreatment::Drop);
    assert!(e <= 1e-3);
}

#[test]
fn inner_cut_change_scales_with_core_order() {
    let g = GridSpec::new(1, 20.0, 1024).unwrap();
    let h = g.spacing();
    let (m, s) = (1.0, 0.3);
    let u = gaussian(g);
    let run = |c: f64| {
        let mut cfg = SingularQuadratureConfig::for_grid(&g);
        cfg.inner_cut = c;
        apply_singular_integral(&u, m, s, &cfg).unwrap()
    };
    let cuts = [8.0 * h, 4.0 * h, 2.0 * h, 0.5 * h];
    let outs: Vec<GridField> = cuts.iter().map(|&c| run(c)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = (0..3)
        .map(|i| (cuts[i].ln(), outs[i].sub(&outs[i + 1]).max_abs().ln()))
        .unzip();
    let fit = fit_line(&xs, &ys).unwrap();
    assert!((fit.slope - (2.0 - 2.0 * s)).abs() < 0.15, "slope {}", fit.slope);
}

#[test]
fn reflections_and_cell_translations_commute() {
    let g = GridSpec::new(2, 6.0, 64).unwrap();
    let u = GridField::from_fn(g, |x| (-(x[0] - 0.7).powi(2) - 2.0 * (x[1] + 0.3).powi(2)).exp() * (1.0 + x[0])).unwrap();
    let (m, s) = (1.2, 0.35);
    let n = g.points();
    let reflect = |f: &GridField| {
        let mut out = vec![0.0; g.len()];
        for (i, v) in f.values().iter().enumerate() {
            let mut idx = g.multi_index(i);
            idx[0] = (n - idx[0]) % n;
            out[g.flat_index(&idx)] = *v;
        }
        GridField::new(g, out).unwrap()
    };
    let shift = [3.0 * g.spacing(), -5.0 * g.spacing()];
    let cfg = SingularQuadratureConfig::for_grid(&g);
    let ops: [Box<dyn Fn(&GridField) -> GridField>; 2] = [
        Box::new(|f| apply_fourier(f, m, s).unwrap()),
        Box::new(|f| apply_singular_integral(f, m, s, &cfg).unwrap()),
    ];
    for op in &ops {
        let a = op(&reflect(&u));
        let b = reflect(&op(&u));
        assert!(a.sub(&b).max_abs() < 1e-12);
        let a = op(&translate(&u, &shift));
        let b = translate(&op(&u), &shift);
        assert!(a.sub(&b).max_abs() < 1e-11);
    }
}
