//! Sensitivity of the final indicator to the number of weights `K` and the
//! phase-one share `r_1st`, as a `K × r_1st` table.

use tpb::assess::indicator_of;
use tpb::problems::{make_problem, reference_front, FunctionKind};
use tpb::tpb::{run_tpb, TpbConfig};

const R_VALUES: [f64; 6] = [0.7, 0.75, 0.8, 0.85, 0.9, 0.95];

pub fn run_example(n: usize, instances: u64) -> tpb::Result<()> {
    let mut problems = Vec::new();
    for instance in 1..=instances {
        let p = make_problem(FunctionKind::Sphere, FunctionKind::Ellipsoid, n, instance)?;
        let refdata = reference_front(&p, 100)?;
        problems.push((p, refdata));
    }
    print!("sphere/ellipsoid N={n}\n{:>4}", "K");
    for r in R_VALUES {
        print!("{r:>9}");
    }
    println!();
    for k in [3, 4, 5] {
        print!("{k:>4}");
        for r_1st in R_VALUES {
            let mut mean = 0.0;
            for (p, refdata) in &problems {
                let cfg = TpbConfig {
                    k,
                    r_1st,
                    ..TpbConfig::for_budget(20 * n)
                };
                let run = run_tpb(p, &cfg)?;
                mean += indicator_of(run.ledger.objectives(), refdata)? / problems.len() as f64;
            }
            print!("{mean:>9.4}");
        }
        println!();
    }
    Ok(())
}

fn main() -> tpb::Result<()> {
    run_example(10, 5)
}
