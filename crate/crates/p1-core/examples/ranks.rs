// Standalone instrumented copy of the Newton core to find the stall.
use p1_core::geometry::facial_set;
use p1_core::model::*;

fn main() {
    let a = DesignMatrix::build(4, ReciprocationVariant::Constant, MatrixForm::Full).unwrap();
    let t = SufficientStatistic { values: vec![1,1,1,1,1,1,3,2,1,1,1,2,2,2,7,2] };
    let f = facial_set(&a, &t).unwrap();
    let allowed = &f.indices;
    let nl = a.non_lambda_rows();
    let d_rows = nl.len();
    let cols: Vec<Vec<f64>> = (0..a.cols())
        .map(|c| nl.clone().map(|r| a.entry(r, c) as f64).collect())
        .collect();
    let mut per_dyad: Vec<Vec<usize>> = vec![Vec::new(); 6];
    for &c in allowed { per_dyad[c / 4].push(c); }
    // basis = all allowed columns (overcomplete: use gradient descent on full zeta instead)
    let target_nl: Vec<f64> = nl.clone().map(|row| t.values[row] as f64).collect();

    // simple steepest ascent with per-dyad softmax, to see if the floor is
    // intrinsic or an artifact of the reduced Newton
    let mut zeta = vec![0.0f64; d_rows];
    let compute_p = |zeta: &[f64]| -> Vec<f64> {
        let mut p = vec![0.0f64; a.cols()];
        for group in &per_dyad {
            let mut mx = f64::NEG_INFINITY;
            for &c in group {
                let w: f64 = cols[c].iter().zip(zeta).map(|(a, z)| a * z).sum();
                p[c] = w; mx = mx.max(w);
            }
            let mut zs = 0.0;
            for &c in group { p[c] = (p[c] - mx).exp(); zs += p[c]; }
            for &c in group { p[c] /= zs; }
        }
        p
    };
    let grad_of = |p: &[f64]| -> Vec<f64> {
        let mut g = target_nl.clone();
        for group in &per_dyad {
            for &c in group {
                for (row, gv) in g.iter_mut().enumerate() { *gv -= cols[c][row] * p[c]; }
            }
        }
        g
    };
    let mut step = 0.5f64;
    for it in 0..2_000_000 {
        let p = compute_p(&zeta);
        let g = grad_of(&p);
        let norm = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if it % 200_000 == 0 || norm < 1e-11 {
            println!("iter {it}: grad_inf={norm:e} zeta0={:.3}", zeta[0]);
            if norm < 1e-11 { break; }
        }
        for (z, gv) in zeta.iter_mut().zip(&g) { *z += step * gv; }
        step = 0.5;
    }
}
