#![allow(dead_code)]

use plateau::complex::{assign_signs, PlateauComplex, SignAssignment, VertexKind};
use plateau::funcspace::{constraint_blocks, project_compatible, ScalarField};
use plateau::golden::{self, GoldenMesh};
use plateau::multijunction::MultiFile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn golden(name: &str, h: f64) -> PlateauComplex {
    match golden::generate_golden(name, h).expect("corpus name") {
        GoldenMesh::Plateau(m) => PlateauComplex::build(m.into_raw().unwrap()).unwrap(),
        GoldenMesh::Multi(m) => m.into_complex().unwrap().0,
    }
}

pub fn build(m: plateau::complex::MeshFile) -> PlateauComplex {
    PlateauComplex::build(m.into_raw().unwrap()).unwrap()
}

pub fn build_multi(m: MultiFile) -> (PlateauComplex, Vec<f64>) {
    m.into_complex().unwrap()
}

pub fn with_signs(c: &PlateauComplex) -> SignAssignment {
    assign_signs(c).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random field projected onto the compatible subspace, zero on the boundary.
pub fn random_compatible(c: &PlateauComplex, s: &SignAssignment, rng: &mut ChaCha8Rng) -> ScalarField {
    let mut f = ScalarField { values: (0..c.num_slots()).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    project_compatible(&constraint_blocks(c, s), &mut f);
    for (k, slot) in c.slots().iter().enumerate() {
        if c.kind(slot.vertex) == VertexKind::Boundary {
            f.values[k] = 0.0;
        }
    }
    f
}

/// Vertex closest to a point.
pub fn nearest_vertex(c: &PlateauComplex, p: plateau::Vec3) -> usize {
    (0..c.vertices().len()).min_by(|&a, &b| (c.vertex(a) - p).norm().total_cmp(&(c.vertex(b) - p).norm())).unwrap()
}
