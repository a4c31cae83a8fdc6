//! Exact integer scalars.
//!
//! Every piece of linear algebra in this crate runs over a Euclidean ring of
//! integers. The bound below is what the matrix and lattice code needs from
//! the entry type; it is satisfied by the machine integers and by
//! [`num_bigint::BigInt`]. Machine integers are fast but can overflow inside
//! Smith reduction, so the crate-root aliases default to `BigInt`.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// An exact signed integer type usable as a matrix entry.
pub trait IntScalar:
    Integer + Signed + Clone + Debug + Display + Hash + FromPrimitive + ToPrimitive + Send + Sync
{
    fn int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("value fits in scalar")
    }
}

impl IntScalar for i64 {}
impl IntScalar for i128 {}
impl IntScalar for BigInt {}

/// Serde for unbounded integers as decimal strings.
pub mod decimal {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::Int;

    pub fn serialize<S: Serializer>(x: &Int, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}
