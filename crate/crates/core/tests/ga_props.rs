//! Operator safety properties: permutation preservation over ten
//! thousand seeded applications, self-crossover identity, and antibody
//! invariant preservation under the antibody-flavored operators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aisched_core::ga::{
    order_based_crossover, overlap_crossover, swap_mutation, two_point_crossover,
    two_point_crossover_antibodies,
};
use aisched_core::instance::JobId;
use aisched_core::matching::{Antibody, Symbol};

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<JobId> {
    let mut p: Vec<JobId> = (1..=n as JobId).collect();
    p.shuffle(rng);
    p
}

fn sorted(v: &[JobId]) -> Vec<JobId> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

fn random_antibody(rng: &mut ChaCha8Rng, len: usize) -> Antibody {
    let mut ids: Vec<JobId> = (1..=12).collect();
    ids.shuffle(rng);
    let symbols = ids
        .into_iter()
        .take(len)
        .map(|id| {
            if rng.random_bool(0.25) {
                Symbol::Wildcard
            } else {
                Symbol::Job(id)
            }
        })
        .collect();
    Antibody::new(symbols).unwrap()
}

#[test]
fn ten_thousand_applications_preserve_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37);
    for case in 0..10_000 {
        let n = rng.random_range(2..=12);
        let p1 = random_permutation(&mut rng, n);
        let p2 = {
            let mut p = p1.clone();
            p.shuffle(&mut rng);
            p
        };
        let mut child = if case % 2 == 0 {
            order_based_crossover(&p1, &p2, &mut rng).unwrap()
        } else {
            two_point_crossover(&p1, &p2, &mut rng).unwrap()
        };
        assert_eq!(sorted(&child), sorted(&p1), "case {case} broke crossover");
        swap_mutation(&mut child, &mut rng);
        assert_eq!(sorted(&child), sorted(&p1), "case {case} broke mutation");
    }
}

#[test]
fn self_crossover_returns_the_parent() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x11);
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let p = random_permutation(&mut rng, n);
        assert_eq!(order_based_crossover(&p, &p, &mut rng).unwrap(), p);
        assert_eq!(two_point_crossover(&p, &p, &mut rng).unwrap(), p);
        let alen = rng.random_range(1..=6);
        let a = random_antibody(&mut rng, alen);
        assert_eq!(overlap_crossover(&a, &a), a);
        // Wildcards aside, splicing an antibody with itself cannot grow it.
        assert_eq!(
            two_point_crossover_antibodies(&a, &a, &mut rng).unwrap().len(),
            a.len()
        );
    }
}

#[test]
fn antibody_operators_keep_antibody_invariants() {
    // Antibody::new re-validates, so a successful construction inside the
    // operator already proves the invariant; this exercises many shapes.
    let mut rng = ChaCha8Rng::seed_from_u64(0x22);
    for _ in 0..5_000 {
        let len = rng.random_range(1..=6);
        let a = random_antibody(&mut rng, len);
        let b = random_antibody(&mut rng, len);
        let c = two_point_crossover_antibodies(&a, &b, &mut rng).unwrap();
        assert_eq!(c.len(), len);
        let o = overlap_crossover(&a, &b);
        assert!(o.len() <= a.len() + b.len());
    }
}

#[test]
fn overlap_child_joins_prefix_and_suffix() {
    let a: Antibody = "1234".parse().unwrap();
    let b: Antibody = "3456".parse().unwrap();
    assert_eq!(overlap_crossover(&a, &b), "123456".parse().unwrap());
    // No shared run at all: the child is the first parent.
    let c: Antibody = "78".parse().unwrap();
    assert_eq!(overlap_crossover(&a, &c), a);
}
