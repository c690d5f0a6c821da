//! Synthetic problem generators.

use frsvt_core::{gaussian_matrix, Error, Matrix, Result, RngStream};

/// Low-rank matrix as a product of two Gaussian factors, scaled by
/// `1 / sqrt(r)` so entries have unit variance. `r = 0` yields the zero
/// matrix.
pub fn gen_lowrank(rng: &mut RngStream, m: usize, n: usize, r: usize) -> Result<Matrix> {
    if r > m.min(n) {
        return Err(Error::InvalidArgument(format!(
            "gen_lowrank: rank {r} exceeds min dimension {}",
            m.min(n)
        )));
    }
    if r == 0 {
        return Ok(Matrix::zeros(m, n));
    }
    let x = gaussian_matrix(rng, m, r)?;
    let y = gaussian_matrix(rng, r, n)?;
    Ok(x.mul(&y).scale(1.0 / (r as f64).sqrt()))
}

/// Ground-truthed robust-PCA problem: `O = L0 + S0` exactly.
#[derive(Debug, Clone)]
pub struct RpcaInstance {
    pub o: Matrix,
    /// Ground-truth low-rank part.
    pub l0: Matrix,
    /// Ground-truth sparse part.
    pub s0: Matrix,
    pub rank: usize,
    pub corruption_fraction: f64,
    /// Exact support size of `s0`.
    pub support_size: usize,
}

/// Low-rank plus sparse instance: rank `ceil(rank_ratio * min(m, n))`,
/// corruption support drawn uniformly without replacement with
/// `ceil(fraction * m * n)` cells, values uniform on
/// `[-sparse_amplitude, sparse_amplitude]`.
pub fn gen_rpca_instance(
    rng: &mut RngStream,
    m: usize,
    n: usize,
    rank_ratio: f64,
    corruption_fraction: f64,
    sparse_amplitude: f64,
) -> Result<RpcaInstance> {
    if !(rank_ratio > 0.0 && rank_ratio <= 1.0) {
        return Err(Error::InvalidArgument(
            "gen_rpca_instance: rank_ratio must lie in (0, 1]".into(),
        ));
    }
    if !(corruption_fraction > 0.0 && corruption_fraction <= 1.0) {
        return Err(Error::InvalidArgument(
            "gen_rpca_instance: corruption_fraction must lie in (0, 1]".into(),
        ));
    }
    if !(sparse_amplitude > 0.0) {
        return Err(Error::InvalidArgument(
            "gen_rpca_instance: sparse_amplitude must be positive".into(),
        ));
    }
    let rank = ((rank_ratio * m.min(n) as f64).ceil() as usize).max(1);
    let l0 = gen_lowrank(rng, m, n, rank)?;

    let total = m * n;
    let nnz = ((corruption_fraction * total as f64).ceil() as usize).min(total);
    // Partial Fisher-Yates over the flat index space.
    let mut cells: Vec<u32> = (0..total as u32).collect();
    let mut s0 = Matrix::zeros(m, n);
    for drawn in 0..nnz {
        let pick = drawn + rng.index(total - drawn);
        cells.swap(drawn, pick);
        let flat = cells[drawn] as usize;
        let value = rng.uniform(-sparse_amplitude, sparse_amplitude);
        s0.set(flat % m, flat / m, value);
    }

    let o = l0.add(&s0);
    Ok(RpcaInstance {
        o,
        l0,
        s0,
        rank,
        corruption_fraction,
        support_size: nnz,
    })
}

/// `||reference - estimate||_F / ||reference||_F`.
pub fn nrmse(reference: &Matrix, estimate: &Matrix) -> f64 {
    let denom = reference.frobenius_norm();
    let diff = reference.sub(estimate).frobenius_norm();
    if denom == 0.0 {
        diff
    } else {
        diff / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use frsvt_core::svd_exact;

    #[test]
    fn full_rank_when_r_is_min_dim() {
        let mut rng = RngStream::new(100, 0);
        let a = gen_lowrank(&mut rng, 12, 10, 10).unwrap();
        let sv = svd_exact(&a).unwrap().sigma;
        assert!(sv[9] > 1e-8 * sv[0]);
    }

    #[test]
    fn rank_one_has_vanishing_minors() {
        let mut rng = RngStream::new(101, 0);
        let a = gen_lowrank(&mut rng, 6, 5, 1).unwrap();
        for i in 0..5 {
            for j in 0..4 {
                let det = a.get(i, j) * a.get(i + 1, j + 1) - a.get(i, j + 1) * a.get(i + 1, j);
                assert!(det.abs() <= 1e-12 * a.max_abs().powi(2));
            }
        }
    }

    #[test]
    fn generated_rank_is_revealed_by_svd() {
        let mut rng = RngStream::new(102, 0);
        let a = gen_lowrank(&mut rng, 100, 80, 8).unwrap();
        let sv = svd_exact(&a).unwrap().sigma;
        assert!(sv[8] <= 1e-12 * sv[0], "sigma_9/sigma_1 = {}", sv[8] / sv[0]);
    }

    #[test]
    fn zero_rank_gives_zero_matrix() {
        let mut rng = RngStream::new(103, 0);
        let a = gen_lowrank(&mut rng, 4, 4, 0).unwrap();
        assert_eq!(a.frobenius_norm(), 0.0);
        assert!(gen_lowrank(&mut rng, 4, 4, 5).is_err());
    }

    #[test]
    fn instance_support_size_is_exact() {
        let mut rng = RngStream::new(104, 0);
        let inst = gen_rpca_instance(&mut rng, 40, 30, 0.1, 0.07, 10.0).unwrap();
        let expected = (0.07_f64 * 1200.0).ceil() as usize;
        assert_eq!(inst.support_size, expected);
        assert_eq!(inst.s0.count_above(0.0), expected);
        // O = L0 + S0 exactly.
        assert_eq!(inst.o.sub(&inst.l0.add(&inst.s0)).frobenius_norm(), 0.0);
    }

    #[test]
    fn instance_rank_matches_ratio() {
        let mut rng = RngStream::new(105, 0);
        let inst = gen_rpca_instance(&mut rng, 200, 200, 0.1, 0.05, 10.0).unwrap();
        assert_eq!(inst.rank, 20);
        let sv = svd_exact(&inst.l0).unwrap().sigma;
        assert!(sv[20] <= 1e-10 * sv[0]);
    }

    #[test]
    fn rejects_bad_fractions() {
        let mut rng = RngStream::new(106, 0);
        assert!(gen_rpca_instance(&mut rng, 10, 10, 0.0, 0.1, 1.0).is_err());
        assert!(gen_rpca_instance(&mut rng, 10, 10, 0.1, 1.5, 1.0).is_err());
        assert!(gen_rpca_instance(&mut rng, 10, 10, 0.1, 0.1, 0.0).is_err());
    }
}
