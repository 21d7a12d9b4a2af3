//! Runs the Python smoke script against the module registered as a builtin
//! of an embedded interpreter, so no separately built extension is needed.

use std::ffi::CString;

use parapres::parapres;
use pyo3::prelude::*;

#[test]
fn smoke_script_passes() {
    pyo3::append_to_inittab!(parapres);
    Python::initialize();
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/../../python/smoke_test.py");
    let code = CString::new(format!(
        "import runpy, parapres\nassert not hasattr(parapres, '__file__')\nrunpy.run_path({script:?}, run_name='__main__')\nimport sys\nsys.stdout.flush()\n"
    ))
    .unwrap();
    Python::attach(|py| {
        if let Err(e) = py.run(&code, None, None) {
            e.print(py);
            panic!("smoke script failed");
        }
    });
}
