#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn core_data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn survey_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_survey"))
        .args(args)
        .output()
        .expect("run survey binary")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}
