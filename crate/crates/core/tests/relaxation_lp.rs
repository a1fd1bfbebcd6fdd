//! The relaxation solver's continuous value against an exact LP over the
//! epigraph of every chain subgradient, which for submodular `f` describes
//! the Lovász extension exactly.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robsub::constraints::{covering_polytope, ConstraintFamily, CoveringFamily, GraphSpec};
use robsub::function::build_function;
use robsub::generate::{self, Family};
use robsub::robust_min::{cr_submin, CrOptions};
use robsub::{ElementSet, GroundSet, SetFunction};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn chain_weights(f: &SetFunction, order: &[usize]) -> Vec<f64> {
    let n = f.n();
    let mut w = vec![0.0; n];
    let mut prefix = ElementSet::empty(n);
    let mut prev = 0.0;
    for &j in order {
        prefix.insert(j);
        let v = f.value(&prefix);
        w[j] = v - prev;
        prev = v;
    }
    w
}

/// `min t` s.t. `t >= <h, x>` for every chain subgradient `h` of every
/// `f_i`, `x` in the covering polytope.
fn exact(fs: &[SetFunction], cover: &CoveringFamily) -> f64 {
    let n = cover.n;
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let x: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for f in fs {
        for order in permutations(n) {
            let h = chain_weights(f, &order);
            let mut row: Vec<_> = x.iter().zip(&h).map(|(&v, &c)| (v, -c)).collect();
            row.push((t, 1.0));
            lp.add_constraint(row.as_slice(), ComparisonOp::Ge, 0.0);
        }
    }
    for con in &cover.constraints {
        let row: Vec<_> = con.members.iter().map(|&j| (x[j], 1.0)).collect();
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, con.demand as f64);
    }
    lp.solve()
        .expect("covering LP is feasible and bounded")
        .objective()
}

fn check(fs: &[SetFunction], c: &ConstraintFamily) {
    let cover = covering_polytope(c, None).unwrap();
    let lp = exact(fs, &cover);
    let sol = cr_submin(fs, &cover, c, &CrOptions::default()).unwrap();
    let cont = sol.continuous.unwrap();
    assert!(cont >= lp - 1e-7, "continuous {cont} below LP optimum {lp}");
    assert!(cont <= lp + 1e-3, "continuous {cont} vs LP optimum {lp}");
    assert!(sol.worst <= cover.factor() as f64 * cont + 1e-3);
}

#[test]
fn triangle_vertex_cover() {
    let c = ConstraintFamily::VertexCover {
        graph: GraphSpec::undirected(3, vec![(0, 1), (1, 2), (0, 2)]),
    };
    let f = SetFunction::modular(vec![1.0; 3]).unwrap();
    check(&[f], &c);
}

#[test]
fn random_instances_match_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..12 {
        let n = rng.random_range(3..=6);
        let c = if i % 2 == 0 {
            let mut edges: Vec<(usize, usize)> =
                (1..n).map(|v| (rng.random_range(0..v), v)).collect();
            edges.push((0, n - 1));
            ConstraintFamily::VertexCover {
                graph: GraphSpec::undirected(n, edges),
            }
        } else {
            ConstraintFamily::CardinalityLower {
                n,
                k: rng.random_range(1..n),
            }
        };
        let g = GroundSet::new(n).unwrap();
        let fams = [
            Family::ClusteredSqrt,
            Family::FacilityLocation,
            Family::Coverage,
        ];
        let fs: Vec<SetFunction> = (0..rng.random_range(1..=3))
            .map(|_| {
                let fam = fams[rng.random_range(0..fams.len())];
                build_function(&generate::function(fam, n, &mut rng), &g).unwrap()
            })
            .collect();
        check(&fs, &c);
    }
}
