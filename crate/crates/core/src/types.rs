use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_finite(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptyVector);
    }
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

macro_rules! real_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Serialize)]
        #[serde(transparent)]
        pub struct $name(Vec<f64>);

        impl $name {
            /// Builds a vector, rejecting empty input and non-finite components.
            pub fn new(values: Vec<f64>) -> Result<Self> {
                check_finite(&values)?;
                Ok(Self(values))
            }

            /// Like [`Self::new`] but additionally requires `values.len() == dim`.
            pub fn with_dim(values: Vec<f64>, dim: usize) -> Result<Self> {
                if values.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: values.len(),
                    });
                }
                Self::new(values)
            }

            pub fn zeros(dim: usize) -> Self {
                Self(vec![0.0; dim])
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }

            /// Internal constructor for operators whose arithmetic cannot
            /// produce non-finite values from finite inputs.
            pub(crate) fn from_raw(values: Vec<f64>) -> Self {
                debug_assert!(values.iter().all(|v| v.is_finite()));
                Self(values)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let values = Vec::<f64>::deserialize(d)?;
                Self::new(values).map_err(serde::de::Error::custom)
            }
        }

        impl std::ops::Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl TryFrom<Vec<f64>> for $name {
            type Error = Error;
            fn try_from(values: Vec<f64>) -> Result<Self> {
                Self::new(values)
            }
        }
    };
}

real_vector! {
    /// A point in the generator's input space (the genotype).
    LatentVector
}

real_vector! {
    /// A point in the recognition model's output space.
    Embedding
}

/// Euclidean (L2) distance between two equally sized slices.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// A genotype with its cached evaluation.
///
/// Fitness and distance are set together and always satisfy
/// `fitness == -distance`.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    genotype: LatentVector,
    distance: Option<f64>,
}

impl Individual {
    pub fn new(genotype: LatentVector) -> Self {
        Self {
            genotype,
            distance: None,
        }
    }

    pub fn evaluated(genotype: LatentVector, distance: f64) -> Result<Self> {
        let mut ind = Self::new(genotype);
        ind.set_distance(distance)?;
        Ok(ind)
    }

    pub fn genotype(&self) -> &LatentVector {
        &self.genotype
    }

    pub fn distance(&self) -> Option<f64> {
        self.distance
    }

    pub fn fitness(&self) -> Option<f64> {
        self.distance.map(|d| -d)
    }

    pub fn is_evaluated(&self) -> bool {
        self.distance.is_some()
    }

    pub fn set_distance(&mut self, distance: f64) -> Result<()> {
        if !distance.is_finite() || distance < 0.0 {
            return Err(Error::NegativeDistance(distance));
        }
        self.distance = Some(distance);
        Ok(())
    }

    /// Replaces the genotype. The cached evaluation is dropped only if the
    /// genotype actually changed.
    pub fn replace_genotype(&mut self, genotype: LatentVector) {
        if genotype != self.genotype {
            self.genotype = genotype;
            self.distance = None;
        }
    }

    pub fn invalidate(&mut self) {
        self.distance = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        assert!(matches!(
            LatentVector::new(vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
        assert!(matches!(
            Embedding::new(vec![f64::INFINITY]),
            Err(Error::NonFinite { index: 0, .. })
        ));
        assert!(matches!(
            LatentVector::with_dim(vec![0.0; 3], 4),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 3
            })
        ));
        assert!(matches!(LatentVector::new(vec![]), Err(Error::EmptyVector)));
        assert_eq!(
            LatentVector::with_dim(vec![1.0; 512], 512).unwrap().len(),
            512
        );
    }

    #[test]
    fn deserialize_validates() {
        let err = serde_json::from_str::<Embedding>("[1.0, 2.0]").unwrap();
        assert_eq!(err.as_slice(), &[1.0, 2.0]);
        assert!(serde_json::from_str::<Embedding>("[]").is_err());
    }

    #[test]
    fn three_four_five() {
        let a = [1.0, 2.0, 0.0, 7.0];
        let b = [1.0, 5.0, 4.0, 7.0];
        assert_eq!(euclidean_distance(&a, &b).unwrap(), 5.0);
        assert!(euclidean_distance(&a, &b[..3]).is_err());
    }

    #[test]
    fn fitness_is_negated_distance() {
        let mut ind = Individual::new(LatentVector::zeros(2));
        assert_eq!(ind.fitness(), None);
        ind.set_distance(0.35).unwrap();
        assert_eq!(ind.fitness().unwrap() + ind.distance().unwrap(), 0.0);
        assert!(ind.set_distance(-1.0).is_err());

        ind.replace_genotype(LatentVector::zeros(2));
        assert!(ind.is_evaluated());
        ind.replace_genotype(LatentVector::new(vec![1.0, 0.0]).unwrap());
        assert!(!ind.is_evaluated());
    }
}
