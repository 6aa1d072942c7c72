//! Small experiments that recur in examples, tests and demos.

use num_traits::One;

use crate::algebra::{ratio, Matrix, Scalar};
use crate::model::Experiment;
use crate::Rational;

/// One Bernoulli trial, `π(1|θ) = θ`, for each listed success probability.
pub fn bernoulli<T: Scalar>(thetas: &[T]) -> Experiment<T> {
    let rows = thetas.iter().map(|t| vec![T::one() - t.clone(), t.clone()]).collect();
    let parameters = thetas.iter().map(Scalar::format_scalar).collect();
    Experiment::new(parameters, vec!["0".into(), "1".into()], Matrix::from_rows(rows).expect("rectangular"))
        .expect("valid Bernoulli kernel")
}

/// Bernoulli trial on the parameter grid `{0, 1/2, 1}`.
pub fn bernoulli_grid() -> Experiment<Rational> {
    bernoulli(&[ratio(0, 1), ratio(1, 2), ratio(1, 1)])
}

/// The same trial observed through a 10% uniform garbling: `π'(1|θ) = 1/20 + 9θ/10`.
pub fn noisy_bernoulli_grid() -> Experiment<Rational> {
    bernoulli_grid().uniform_garble(&ratio(1, 10)).expect("epsilon in range")
}

/// A pair where a nonnegative factorization exists but no Markov one:
/// `π_Y` is 3x4, `π_Z` is 3x3.
pub fn nonneg_pair() -> (Experiment<Rational>, Experiment<Rational>) {
    let h = || ratio(1, 2);
    let z = || ratio(0, 1);
    let y = Matrix::from_rows(vec![
        vec![h(), z(), z(), h()],
        vec![z(), h(), z(), h()],
        vec![z(), z(), h(), h()],
    ])
    .expect("rectangular");
    let zk = Matrix::from_rows(vec![vec![h(), h(), z()], vec![h(), z(), h()], vec![z(), h(), h()]]).expect("rectangular");
    let params: Vec<String> = ["t1", "t2", "t3"].iter().map(|s| s.to_string()).collect();
    let ey = Experiment::new(params.clone(), (1..=4).map(|i| i.to_string()).collect(), y).expect("valid");
    let ez = Experiment::new(params, (1..=3).map(|i| i.to_string()).collect(), zk).expect("valid");
    (ey, ez)
}

/// The 0/1 factor `M` with `π_Z = π_Y M` for [`nonneg_pair`].
pub fn nonneg_pair_witness() -> Matrix<Rational> {
    let o = || Rational::one();
    let z = || ratio(0, 1);
    Matrix::from_rows(vec![vec![o(), o(), z()], vec![o(), z(), o()], vec![z(), o(), o()], vec![z(), z(), z()]])
        .expect("rectangular")
}

/// Serial numbers `1..=n_max`, one drawn uniformly from `1..=θ`:
/// `π(k|θ) = 1/θ` for `k <= θ`.
pub fn german_tank(n_max: usize) -> Experiment<Rational> {
    let labels: Vec<String> = (1..=n_max).map(|i| i.to_string()).collect();
    let mut kernel = Matrix::zeros(n_max, n_max);
    for theta in 1..=n_max {
        for k in 1..=theta {
            kernel[(theta - 1, k - 1)] = ratio(1, theta as i64);
        }
    }
    Experiment::new(labels.clone(), labels, kernel).expect("valid kernel")
}
