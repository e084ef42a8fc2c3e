use nonclass::geometry::{lambda_even_boundary, lambda_even_interior, CurveSpec};
use nonclass::states::{probability_vector, EfficiencySettings, StateModel};

fn main() {
    let settings = EfficiencySettings::uniform(4, 0.9).unwrap();
    let p = probability_vector(&StateModel::Coherent { amplitude_sq: 1.3 }, &settings).unwrap();
    println!("P = {:?}", p.as_slice());
    let spec = CurveSpec::from_settings(&settings);
    let t_star = (-(0.9 * 0.25) * 1.3f64).exp();
    println!("t* = {t_star}");

    let (v, d) = nonclass::certify::max_violation(&p, &settings).unwrap();
    println!("max_violation V = {v}");
    println!("best zeros = {:?} boundary {:?}", d.zeros.ts, d.zeros.boundary);
    println!("lambda = {:?} sup = {}", d.lambda, d.sup_value);
    // grid scan of the best direction
    let mut gmax = f64::NEG_INFINITY;
    let mut arg = 0.0;
    for k in 0..=100_000 {
        let t = k as f64 / 100_000.0;
        let s: f64 = d
            .lambda
            .iter()
            .zip(spec.point(t).unwrap())
            .map(|(a, b)| a * b)
            .sum();
        if s > gmax {
            gmax = s;
            arg = t;
        }
    }
    println!("grid max of lambda.Pi = {gmax} at t = {arg} (sup_value = {})", d.sup_value);

    // scan both families on a coarse grid of zero pairs to find positive objective values
    for name in ["interior", "boundary"] {
        let mut worst = f64::NEG_INFINITY;
        let mut at = (0.0, 0.0);
        let grid = 60;
        for i in 0..=grid {
            let t1 = i as f64 / grid as f64;
            if name == "boundary" {
                if let Ok(d) = lambda_even_boundary(&spec, &[t1]) {
                    let v: f64 =
                        d.lambda.iter().zip(p.as_slice()).map(|(a, b)| a * b).sum::<f64>()
                            - d.sup_value;
                    if v > worst {
                        worst = v;
                        at = (t1, f64::NAN);
                    }
                }
                continue;
            }
            for j in i..=grid {
                let t2 = j as f64 / grid as f64;
                if let Ok(d) = lambda_even_interior(&spec, &[t1, t2]) {
                    let v: f64 =
                        d.lambda.iter().zip(p.as_slice()).map(|(a, b)| a * b).sum::<f64>()
                            - d.sup_value;
                    if v > worst {
                        worst = v;
                        at = (t1, t2);
                    }
                }
            }
        }
        println!("{name}: max objective on coarse grid = {worst} at {at:?}");
    }
}
