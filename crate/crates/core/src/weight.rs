//! Exact integer arithmetic used by the search kernels.
//!
//! Instances store arbitrary-precision efficiencies. The kernels are generic
//! over [`Weight`] and run on the narrowest machine integer that cannot
//! overflow for the instance at hand, falling back to `BigInt`.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::instance::Instance;

pub trait Weight:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_biguint(v: &BigUint) -> Self;
    fn to_bigint(&self) -> BigInt;
    fn from_bigint(v: &BigInt) -> Self;
}

impl Weight for i64 {
    fn from_biguint(v: &BigUint) -> Self {
        v.to_i64().expect("efficiency exceeds i64 width")
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_i64().expect("value exceeds i64 width")
    }
}

impl Weight for i128 {
    fn from_biguint(v: &BigUint) -> Self {
        v.to_i128().expect("efficiency exceeds i128 width")
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_i128().expect("value exceeds i128 width")
    }
}

impl Weight for BigInt {
    fn from_biguint(v: &BigUint) -> Self {
        BigInt::from(v.clone())
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Width {
    I64,
    I128,
    Big,
}

impl Width {
    /// Every quantity the kernels form is bounded in magnitude by a small
    /// multiple of the sum of per-agent maxima, so that sum picks the width.
    pub fn of(instance: &Instance) -> Width {
        let total: BigUint = instance.agents().iter().map(|a| a.max_eff()).sum();
        let bits = total.bits();
        if bits <= 58 {
            Width::I64
        } else if bits <= 122 {
            Width::I128
        } else {
            Width::Big
        }
    }
}

/// Runs `$body` with `$w` bound to the integer type selected for `$inst`.
macro_rules! with_weight {
    ($inst:expr, $w:ident => $body:expr) => {
        match $crate::weight::Width::of($inst) {
            $crate::weight::Width::I64 => {
                type $w = i64;
                $body
            }
            $crate::weight::Width::I128 => {
                type $w = i128;
                $body
            }
            $crate::weight::Width::Big => {
                type $w = ::num_bigint::BigInt;
                $body
            }
        }
    };
}
pub(crate) use with_weight;

/// Efficiency matrix converted to `W`, rows are agents.
#[derive(Debug, Clone)]
pub struct Matrix<W> {
    pub tasks: usize,
    pub rows: Vec<Vec<W>>,
    pub row_max: Vec<W>,
    pub row_sum: Vec<W>,
}

impl<W: Weight> Matrix<W> {
    pub fn new(instance: &Instance) -> Self {
        let rows: Vec<Vec<W>> = instance
            .agents()
            .iter()
            .map(|a| a.eff.iter().map(W::from_biguint).collect())
            .collect();
        let row_max = rows
            .iter()
            .map(|r| r.iter().max().cloned().unwrap_or_else(W::zero))
            .collect();
        let row_sum = rows
            .iter()
            .map(|r| r.iter().fold(W::zero(), |acc, x| acc + x.clone()))
            .collect();
        Matrix {
            tasks: instance.tasks(),
            rows,
            row_max,
            row_sum,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}
