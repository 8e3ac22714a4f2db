//! Serialization helpers shared by report types.

use serde::Serializer;

/// Writes non-finite floats as `null` so reports stay valid JSON.
pub(crate) fn finite_or_null<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if value.is_finite() {
        serializer.serialize_f64(*value)
    } else {
        serializer.serialize_none()
    }
}
