//! Helpers shared by the black-box CLI test targets.
#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub const HEADER: &str =
    "n,t_seconds,classical_y,classical_abs_y,ideal_prob,sampled_prob,reconstructed_abs_y";

pub fn qfir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfir"))
        .args(args)
        .output()
        .expect("binary should run")
}

#[derive(Debug, Clone, Copy)]
pub struct Row {
    pub n: usize,
    pub t_seconds: f64,
    pub classical_y: f64,
    pub classical_abs_y: f64,
    pub ideal_prob: f64,
    pub sampled_prob: f64,
    pub reconstructed_abs_y: f64,
}

pub fn read_rows(path: &Path) -> Vec<Row> {
    let text = std::fs::read_to_string(path).expect("output CSV exists");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER), "unexpected header");
    lines
        .map(|line| {
            let v: Vec<&str> = line.split(',').collect();
            assert_eq!(v.len(), 7, "malformed row {line:?}");
            Row {
                n: v[0].parse().unwrap(),
                t_seconds: v[1].parse().unwrap(),
                classical_y: v[2].parse().unwrap(),
                classical_abs_y: v[3].parse().unwrap(),
                ideal_prob: v[4].parse().unwrap(),
                sampled_prob: v[5].parse().unwrap(),
                reconstructed_abs_y: v[6].parse().unwrap(),
            }
        })
        .collect()
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}
