use pyo3::prelude::*;

#[pymodule]
fn ibnls(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
