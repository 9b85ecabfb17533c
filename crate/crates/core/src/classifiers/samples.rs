use crate::dataset::{Instance, Scaler};

/// Row-major training matrix with labels, the working form for all fits.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Samples {
    pub x: Vec<f64>,
    pub y: Vec<u8>,
    pub d: usize,
}

impl Samples {
    pub fn from_instances(instances: &[Instance], d: usize, scaler: Option<&Scaler>) -> Self {
        let mut x = Vec::with_capacity(instances.len() * d);
        for inst in instances {
            match scaler {
                Some(s) => x.extend(inst.features.iter().enumerate().map(|(j, &v)| s.transform_value(j, v))),
                None => x.extend_from_slice(&inst.features),
            }
        }
        Samples {
            x,
            y: instances.iter().map(|i| i.label).collect(),
            d,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.y.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.d + j]
    }

    pub fn subset(&self, idx: &[usize]) -> Samples {
        let mut x = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            x.extend_from_slice(self.row(i));
        }
        Samples {
            x,
            y: idx.iter().map(|&i| self.y[i]).collect(),
            d: self.d,
        }
    }

    pub fn counts(&self, idx: &[usize]) -> [f64; 2] {
        let mut c = [0.0; 2];
        for &i in idx {
            c[self.y[i] as usize] += 1.0;
        }
        c
    }

    pub fn all_counts(&self) -> [f64; 2] {
        let mut c = [0.0; 2];
        for &l in &self.y {
            c[l as usize] += 1.0;
        }
        c
    }

    /// Column `j` as a contiguous vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n()).map(|i| self.value(i, j)).collect()
    }
}

/// Majority label of class counts, ties to 0.
#[inline]
pub(crate) fn majority(counts: [f64; 2]) -> u8 {
    u8::from(counts[1] > counts[0])
}
