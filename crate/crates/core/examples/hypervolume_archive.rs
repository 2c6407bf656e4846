//! Streaming points into the nondominated archive and tracking the
//! hypervolume-regret indicator as it improves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tpb::assess::{hypervolume_2d, indicator_value, nondominated_filter, Archive, IndicatorTrace};
use tpb::problems::{make_problem, reference_front, FunctionKind};

pub fn run_example() -> tpb::Result<()> {
    println!("hv of {{(0.2,0.8),(0.8,0.2)}} = {}", hypervolume_2d(&[vec![0.2, 0.8], vec![0.8, 0.2]], &[1.0, 1.0]));

    let problem = make_problem(FunctionKind::Sphere, FunctionKind::Ellipsoid, 3, 1)?;
    let refdata = reference_front(&problem, 100)?;
    println!("reference front: {} points, ref_hv {:.4}", refdata.front.len(), refdata.ref_hv);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut archive = Archive::new();
    let mut all = Vec::new();
    for i in 1..=2000 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
        let f = problem.evaluate_objectives(&x)?;
        all.push(f.clone());
        archive.insert(x, f);
        if i % 400 == 0 {
            println!(
                "after {i:>4} samples: archive {:>3}, indicator {:.4}",
                archive.len(),
                indicator_value(&archive, &refdata)?
            );
        }
    }
    assert_eq!(archive.len(), nondominated_filter(&all).len());

    let trace = IndicatorTrace::from_objectives(&all, &refdata)?;
    let hit = trace.hits.iter().filter(|h| h.is_some()).count();
    println!("random search reached {hit} of {} targets", trace.targets.len());
    Ok(())
}

fn main() -> tpb::Result<()> {
    run_example()
}
