use crate::error::{Error, Result};
use crate::glm::Family;
use crate::linalg::Matrix;
use crate::stats::RngStream;

/// Linear predictors of Poisson draws are clamped to `[-ETA_CLAMP, ETA_CLAMP]`.
pub const ETA_CLAMP: f64 = 30.0;

/// `n × (p + 1)` design: intercept, then `p` standard normal predictors with
/// `corr(x_a, x_b) = rho^|a-b|`.
pub fn gen_design(n: usize, p: usize, rho: f64, stream: &mut RngStream) -> Result<Matrix<f64>> {
    if !(rho.abs() < 1.0) {
        return Err(Error::Domain(format!("|rho| must be < 1, got {rho}")));
    }
    let innovation = (1.0 - rho * rho).sqrt();
    let mut x = Matrix::zeros(n, p + 1);
    for i in 0..n {
        x.set(i, 0, 1.0);
        let mut prev = 0.0;
        for j in 1..=p {
            let z = stream.standard_normal();
            let v = if j == 1 { z } else { rho * prev + innovation * z };
            x.set(i, j, v);
            prev = v;
        }
    }
    Ok(x)
}

/// Simulated response and the number of clamped Poisson predictors.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub y: Vec<f64>,
    pub clamped: usize,
}

pub fn gen_response(
    x: &Matrix<f64>,
    beta: &[f64],
    family: Family,
    sigma: f64,
    stream: &mut RngStream,
) -> Result<Response> {
    if beta.len() != x.cols() {
        return Err(Error::Usage(format!(
            "coefficient vector of length {} for a design with {} columns",
            beta.len(),
            x.cols()
        )));
    }
    let eta = x.mul_vec(beta);
    let mut clamped = 0;
    let mut y = Vec::with_capacity(eta.len());
    for &e in &eta {
        let v = match family {
            Family::Gaussian => e + sigma * stream.standard_normal(),
            Family::Binomial => {
                let prob = Family::Binomial.mean(e);
                f64::from(stream.bernoulli(prob)?)
            }
            Family::Poisson => {
                let c = e.clamp(-ETA_CLAMP, ETA_CLAMP);
                if c != e {
                    clamped += 1;
                }
                stream.poisson(c.exp())? as f64
            }
        };
        y.push(v);
    }
    Ok(Response { y, clamped })
}
