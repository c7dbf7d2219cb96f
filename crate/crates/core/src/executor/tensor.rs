use num_complex::Complex;

use crate::error::{Error, Result};
use crate::graph::WireId;
use crate::scalar::Scalar;

/// Dense complex tensor. Entries are row-major over `legs`: the last leg
/// varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<F: Scalar> {
    legs: Vec<(WireId, usize)>,
    data: Vec<Complex<F>>,
}

impl<F: Scalar> DenseTensor<F> {
    pub fn new(legs: Vec<(WireId, usize)>, data: Vec<Complex<F>>) -> Result<Self> {
        let size: usize = legs.iter().map(|&(_, d)| d).product();
        if size != data.len() {
            return Err(Error::Contract(format!(
                "tensor with leg dimensions {:?} needs {size} entries, got {}",
                legs.iter().map(|l| l.1).collect::<Vec<_>>(),
                data.len()
            )));
        }
        for (i, (id, _)) in legs.iter().enumerate() {
            if legs[..i].iter().any(|(other, _)| other == id) {
                return Err(Error::Contract(format!("leg {id} repeated within a tensor")));
            }
        }
        Ok(DenseTensor { legs, data })
    }

    pub fn scalar(value: Complex<F>) -> Self {
        DenseTensor {
            legs: Vec::new(),
            data: vec![value],
        }
    }

    pub fn legs(&self) -> &[(WireId, usize)] {
        &self.legs
    }

    pub fn data(&self) -> &[Complex<F>] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.legs.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Entry at a multi-index given in leg order.
    pub fn get(&self, index: &[usize]) -> Complex<F> {
        let mut flat = 0;
        for (&i, &(_, d)) in index.iter().zip(&self.legs) {
            flat = flat * d + i;
        }
        self.data[flat]
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.legs.len()];
        for i in (0..self.legs.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.legs[i + 1].1;
        }
        strides
    }

    /// Contracts `self` with `other` over all shared leg ids. Returns the
    /// result and the kernel's multiply-add count (the product of all
    /// distinct leg dimensions touched).
    pub fn contract(&self, other: &Self) -> Result<(Self, u64)> {
        let shared: Vec<(usize, usize)> = self
            .legs
            .iter()
            .enumerate()
            .filter_map(|(i, (id, _))| other.legs.iter().position(|(o, _)| o == id).map(|j| (i, j)))
            .collect();
        for &(i, j) in &shared {
            if self.legs[i].1 != other.legs[j].1 {
                return Err(Error::Contract(format!(
                    "leg {} has dimension {} and {}",
                    self.legs[i].0, self.legs[i].1, other.legs[j].1
                )));
            }
        }
        let free_a: Vec<usize> = (0..self.rank()).filter(|i| !shared.iter().any(|s| s.0 == *i)).collect();
        let free_b: Vec<usize> = (0..other.rank())
            .filter(|j| !shared.iter().any(|s| s.1 == *j))
            .collect();
        let legs: Vec<(WireId, usize)> = free_a
            .iter()
            .map(|&i| self.legs[i])
            .chain(free_b.iter().map(|&j| other.legs[j]))
            .collect();

        // Loop over (free_a, free_b, shared) as one mixed-radix counter.
        let sa = self.strides();
        let sb = other.strides();
        let mut dims = Vec::new();
        let mut step_a = Vec::new();
        let mut step_b = Vec::new();
        for &i in &free_a {
            dims.push(self.legs[i].1);
            step_a.push(sa[i]);
            step_b.push(0);
        }
        for &j in &free_b {
            dims.push(other.legs[j].1);
            step_a.push(0);
            step_b.push(sb[j]);
        }
        let n_free = dims.len();
        for &(i, j) in &shared {
            dims.push(self.legs[i].1);
            step_a.push(sa[i]);
            step_b.push(sb[j]);
        }
        let out_len: usize = dims[..n_free].iter().product();
        let inner: usize = dims[n_free..].iter().product();
        let mut data = vec![Complex::new(F::zero(), F::zero()); out_len];
        let mut counter = vec![0usize; dims.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for out in data.iter_mut() {
            let mut acc = Complex::new(F::zero(), F::zero());
            for _ in 0..inner {
                acc += self.data[ia] * other.data[ib];
                // advance the shared part of the counter
                let mut k = dims.len();
                while k > n_free {
                    k -= 1;
                    counter[k] += 1;
                    ia += step_a[k];
                    ib += step_b[k];
                    if counter[k] < dims[k] {
                        break;
                    }
                    ia -= step_a[k] * dims[k];
                    ib -= step_b[k] * dims[k];
                    counter[k] = 0;
                }
            }
            *out = acc;
            let mut k = n_free;
            while k > 0 {
                k -= 1;
                counter[k] += 1;
                ia += step_a[k];
                ib += step_b[k];
                if counter[k] < dims[k] {
                    break;
                }
                ia -= step_a[k] * dims[k];
                ib -= step_b[k] * dims[k];
                counter[k] = 0;
            }
        }
        let madds = (out_len * inner) as u64;
        Ok((DenseTensor { legs, data }, madds))
    }

    /// Converts entries to another scalar type.
    pub fn cast<G: Scalar>(&self) -> DenseTensor<G> {
        DenseTensor {
            legs: self.legs.clone(),
            data: self
                .data
                .iter()
                .map(|c| {
                    Complex::new(
                        G::from_f64_lossy(c.re.to_f64_lossy()),
                        G::from_f64_lossy(c.im.to_f64_lossy()),
                    )
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn matrix_vector_product() {
        // M[o][i] * v[i]
        let m = DenseTensor::new(
            vec![(WireId(1), 2), (WireId(0), 2)],
            vec![c(1.0), c(2.0), c(3.0), c(4.0)],
        )
        .unwrap();
        let v = DenseTensor::new(vec![(WireId(0), 2)], vec![c(5.0), c(6.0)]).unwrap();
        let (r, madds) = m.contract(&v).unwrap();
        assert_eq!(r.legs(), &[(WireId(1), 2)]);
        assert_eq!(r.data(), &[c(17.0), c(39.0)]);
        assert_eq!(madds, 4);
    }

    #[test]
    fn outer_and_full_contractions() {
        let a = DenseTensor::new(
            vec![(WireId(0), 2), (WireId(1), 3)],
            (0..6).map(|x| c(x as f64)).collect(),
        )
        .unwrap();
        let b = DenseTensor::new(
            vec![(WireId(1), 3), (WireId(0), 2)],
            (0..6).map(|x| c(x as f64)).collect(),
        )
        .unwrap();
        let (s, madds) = a.contract(&b).unwrap();
        // sum_{i,j} a[i][j] * b[j][i]
        let mut expect = 0.0;
        for i in 0..2 {
            for j in 0..3 {
                expect += (i * 3 + j) as f64 * (j * 2 + i) as f64;
            }
        }
        assert_eq!(s.rank(), 0);
        assert_eq!(s.data()[0], c(expect));
        assert_eq!(madds, 6);
        let x = DenseTensor::new(vec![(WireId(5), 2)], vec![c(1.0), c(2.0)]).unwrap();
        let (o, _) = x.contract(&a).unwrap();
        assert_eq!(o.rank(), 3);
        assert_eq!(o.get(&[1, 1, 2]), c(2.0 * 5.0));
    }

    #[test]
    fn shape_checks() {
        assert!(DenseTensor::<f64>::new(vec![(WireId(0), 2)], vec![c(1.0)]).is_err());
        assert!(DenseTensor::<f64>::new(vec![(WireId(0), 1), (WireId(0), 1)], vec![c(1.0)]).is_err());
    }
}
