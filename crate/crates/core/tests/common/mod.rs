#![allow(dead_code)]

pub mod circuit;
pub mod dense;
