//! Number formatting shared by the JSON writers.
//!
//! Lattice coordinates, areas and boxes are emitted as integers whenever the
//! value is integral so that toolkit output carries no spurious `.0`.

use serde::ser::{SerializeSeq, Serializer};

const MAX_EXACT: f64 = 9_007_199_254_740_992.0; // 2^53

fn write_num<S: Serializer>(v: f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < MAX_EXACT {
        s.serialize_i64(v as i64)
    } else {
        s.serialize_f64(v)
    }
}

struct Num(f64);

impl serde::Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        write_num(self.0, s)
    }
}

pub(crate) fn num<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    write_num(*v, s)
}

pub(crate) fn nums<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Num(*x))?;
    }
    seq.end()
}

pub(crate) fn nested_nums<S: Serializer>(v: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
    struct Row<'a>(&'a [f64]);
    impl serde::Serialize for Row<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            nums(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        seq.serialize_element(&Row(row))?;
    }
    seq.end()
}

pub(crate) fn bbox<S: Serializer>(v: &[f64; 4], s: S) -> Result<S::Ok, S::Error> {
    nums(v, s)
}
