//! Bony's paraproduct splitting `fg = f≺g + f∘g + f≻g`.

use crate::error::Result;
use crate::field::{check_cutoffs, SpectralField};
use crate::grid::SpectralGrid;
use crate::partition::DyadicPartition;
use crate::real::Real;

#[derive(Clone, Debug)]
pub struct BonyParts<T> {
    /// `Σ_{i<j-1} Δ_i f Δ_j g`
    pub para_lt: SpectralField<T>,
    /// `Σ_{|i-j|≤1} Δ_i f Δ_j g`
    pub resonant: SpectralField<T>,
    /// `Σ_{i>j+1} Δ_i f Δ_j g`
    pub para_gt: SpectralField<T>,
}

impl<T: Real> BonyParts<T> {
    pub fn sum(&self) -> SpectralField<T> {
        let mut s = self.para_lt.clone();
        s += &self.resonant;
        s += &self.para_gt;
        s
    }
}

fn blocks_of<T: Real>(f: &SpectralField<T>, p: &DyadicPartition) -> Vec<(i32, SpectralField<T>)> {
    p.blocks(f.cutoff())
        .into_iter()
        .map(|j| (j, p.block(f, j)))
        .collect()
}

/// Sum of the blocks whose index satisfies `keep`.
fn select<T: Real>(
    blocks: &[(i32, SpectralField<T>)],
    cutoff: usize,
    keep: impl Fn(i32) -> bool,
) -> Option<SpectralField<T>> {
    let mut acc: Option<SpectralField<T>> = None;
    for (_, b) in blocks.iter().filter(|(j, _)| keep(*j)) {
        match acc.as_mut() {
            Some(a) => *a += b,
            None => acc = Some(b.clone()),
        }
    }
    acc.map(|a| a.resized(cutoff))
}

pub fn bony_decompose<T: Real>(
    grid: &SpectralGrid<T>,
    f: &SpectralField<T>,
    g: &SpectralField<T>,
    partition: &DyadicPartition,
) -> Result<BonyParts<T>> {
    check_cutoffs(f, g)?;
    let k = f.cutoff();
    let fb = blocks_of(f, partition);
    let gb = blocks_of(g, partition);
    let mut para_lt = SpectralField::zeros(k);
    let mut resonant = SpectralField::zeros(k);
    let mut para_gt = SpectralField::zeros(k);
    for (j, gj) in &gb {
        if let Some(low) = select(&fb, k, |i| i < j - 1) {
            para_lt += &grid.product(&low, gj)?;
        }
    }
    for (i, fi) in &fb {
        if let Some(near) = select(&gb, k, |j| (i - j).abs() <= 1) {
            resonant += &grid.product(fi, &near)?;
        }
        if let Some(low) = select(&gb, k, |j| j < i - 1) {
            para_gt += &grid.product(fi, &low)?;
        }
    }
    Ok(BonyParts {
        para_lt,
        resonant,
        para_gt,
    })
}

/// Only the resonant part `f∘g`.
pub fn resonant_product<T: Real>(
    grid: &SpectralGrid<T>,
    f: &SpectralField<T>,
    g: &SpectralField<T>,
    partition: &DyadicPartition,
) -> Result<SpectralField<T>> {
    check_cutoffs(f, g)?;
    let k = f.cutoff();
    let gb = blocks_of(g, partition);
    let mut out = SpectralField::zeros(k);
    for (i, fi) in blocks_of(f, partition) {
        if let Some(near) = select(&gb, k, |j| (i - j).abs() <= 1) {
            out += &grid.product(&fi, &near)?;
        }
    }
    Ok(out)
}
