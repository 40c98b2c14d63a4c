//! Idealized QRAM: unit-cost store and superposed load over `N` cells.
//!
//! Cells start as the dataset's tuples. Stores may overwrite a cell with a
//! new tuple or mark it dummy; a dummy cell evaluates to utility 0 under every
//! utility function and never joins a good set. The dummy mark is a flag kept
//! beside the cell, so a real tuple that happens to score 0 is not a dummy.

use std::collections::HashMap;

use crate::dataset::{Dataset, Tuple, UtilityFunction};
use crate::error::{Error, Result};
use crate::ledger::{AccessKind, IoLedger};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellValue {
    Tuple(Tuple),
    Dummy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell<'a> {
    Tuple(&'a [u32]),
    Dummy,
}

#[derive(Debug, Clone)]
pub struct Qram<'d> {
    dataset: &'d Dataset,
    overrides: HashMap<usize, Vec<u32>>,
    dummy: Vec<bool>,
    dummy_count: usize,
}

impl<'d> Qram<'d> {
    pub fn new(dataset: &'d Dataset) -> Self {
        Qram {
            dataset,
            overrides: HashMap::new(),
            dummy: vec![false; dataset.len()],
            dummy_count: 0,
        }
    }

    pub fn dataset(&self) -> &'d Dataset {
        self.dataset
    }

    pub fn len(&self) -> usize {
        self.dummy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dummy.is_empty()
    }

    fn check(&self, addr: usize) -> Result<()> {
        if addr < self.len() {
            Ok(())
        } else {
            Err(Error::AddressOutOfRange { addr, len: self.len() })
        }
    }

    /// `Q[addr] = value`; one classical write.
    pub fn store(&mut self, addr: usize, value: CellValue, ledger: &mut IoLedger) -> Result<()> {
        self.check(addr)?;
        match value {
            CellValue::Dummy => self.mark_dummy(addr),
            CellValue::Tuple(t) => {
                let ds = self.dataset;
                if t.dims() != ds.dims() {
                    return Err(Error::DimensionMismatch {
                        expected: ds.dims(),
                        got: t.dims(),
                    });
                }
                let limit = 1u64 << ds.attr_bits();
                if let Some(&bad) = t.attrs().iter().find(|&&a| u64::from(a) >= limit) {
                    return Err(Error::AttributeOverflow {
                        value: bad.into(),
                        bits: ds.attr_bits(),
                    });
                }
                if self.dummy[addr] {
                    self.dummy[addr] = false;
                    self.dummy_count -= 1;
                }
                self.overrides.insert(addr, t.attrs().to_vec());
            }
        }
        ledger.record_classical_access(AccessKind::Write, 1);
        Ok(())
    }

    fn mark_dummy(&mut self, addr: usize) {
        if !self.dummy[addr] {
            self.dummy[addr] = true;
            self.dummy_count += 1;
        }
    }

    pub fn load(&self, addr: usize) -> Result<Cell<'_>> {
        self.check(addr)?;
        Ok(self.cell(addr))
    }

    pub(crate) fn cell(&self, addr: usize) -> Cell<'_> {
        if self.dummy[addr] {
            Cell::Dummy
        } else {
            Cell::Tuple(self.attrs(addr))
        }
    }

    /// Attributes held by the cell, ignoring any dummy mark.
    pub fn attrs(&self, addr: usize) -> &[u32] {
        match self.overrides.get(&addr) {
            Some(v) => v,
            None => self.dataset.tuple(addr),
        }
    }

    /// `f` applied to the cell; 0 for dummies.
    pub fn utility(&self, f: &UtilityFunction, addr: usize) -> u64 {
        match self.cell(addr) {
            Cell::Dummy => 0,
            Cell::Tuple(t) => f.evaluate_unchecked(t),
        }
    }

    pub fn is_dummy(&self, addr: usize) -> bool {
        self.dummy[addr]
    }

    pub fn dummy_count(&self) -> usize {
        self.dummy_count
    }

    pub fn dummy_set(&self) -> Vec<usize> {
        self.dummy.iter().enumerate().filter(|(_, &d)| d).map(|(i, _)| i).collect()
    }

    /// Removes one dummy mark (rollback, not an IO).
    pub fn unmark_dummy(&mut self, addr: usize) {
        if self.dummy[addr] {
            self.dummy[addr] = false;
            self.dummy_count -= 1;
        }
    }

    /// Drops every dummy mark, restoring the underlying tuples. Not an IO.
    pub fn clear_dummies(&mut self) {
        if self.dummy_count > 0 {
            self.dummy.iter_mut().for_each(|d| *d = false);
            self.dummy_count = 0;
        }
    }

    pub fn has_overrides(&self) -> bool {
        !self.overrides.is_empty()
    }
}
