use serde::Serializer;

use crate::precision::ExtReal;

pub(crate) fn ext_as_f64<S: Serializer>(x: &ExtReal, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(x.to_f64())
}
