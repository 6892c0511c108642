//! Benchmark-only crate; see `benches/spectral.rs`.

use matprod_core::ensembles::{sample_product, EnsembleSpec, EntryLaw};
use matprod_core::linalg::CMatrix;

/// A fixed Gaussian product ensemble used by the benchmarks.
pub fn bench_product(m: usize, n: usize) -> CMatrix {
    let spec = EnsembleSpec {
        m,
        n,
        entry_law: EntryLaw::ComplexGaussian,
        truncation: None,
        seed: 1234,
    };
    sample_product(&spec, 0).expect("valid spec")
}
