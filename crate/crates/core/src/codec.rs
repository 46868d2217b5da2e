//! Bit-exact wire coding of descriptors.
//!
//! A message is the table followed by two bits `ab`: `00` for `(-1,-1)`,
//! `01` for `(0,0)`, `10` for `(pn,pn)` and `11` for `(pn,pn+1)`. When
//! `a = 1` the table carries an artificial 1 at index `pn`, which is the first
//! 1 since lower cells are empty. Known-size coding writes one bit per cell
//! up to a fixed length; unknown-size coding writes `00`/`01` per cell and
//! closes the table with `11`. In dynamic mode a leading flag bit tells a
//! replacement entry (0) from a change-root notification (1).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hd::{HDescriptor, HdTable, ParamVariant, Vect};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DynFlag {
    /// Replace the stored entry for the sending neighbour.
    Replace,
    /// The sender asks the receiver to become the new root side.
    ChangeRoot,
}

impl DynFlag {
    fn bit(self) -> bool {
        self == DynFlag::ChangeRoot
    }
}

/// An ordered bit sequence as sent on a link.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WireMessage {
    pub bits: Vec<bool>,
}

impl WireMessage {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl fmt::Display for WireMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for WireMessage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Framing(format!("not a bit: {c:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(WireMessage { bits })
    }
}

/// A framing scheme for descriptor messages.
pub trait WireCoding: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    /// Append the table, with the artificial 1 already applied, to `out`.
    fn put_table(&self, cells: &[u32], out: &mut Vec<bool>) -> Result<()>;

    /// Read a table from the front of `bits`; return it and the bits consumed.
    fn take_table(&self, bits: &[bool]) -> Result<(Vec<u32>, usize)>;

    /// Length of the message carrying `hd`, flag bit included.
    fn message_len(&self, hd: &HDescriptor, flag: Option<DynFlag>) -> usize;
}

/// One bit per cell, padded to `lmax` cells; the receiver knows `lmax`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnownN {
    pub lmax: usize,
}

impl KnownN {
    /// Coding for trees of `n` vertices computing `variant`.
    pub fn for_tree(n: usize, variant: ParamVariant) -> Self {
        KnownN { lmax: variant.rules().table_capacity(n) }
    }
}

impl WireCoding for KnownN {
    fn name(&self) -> &'static str {
        "known"
    }

    fn put_table(&self, cells: &[u32], out: &mut Vec<bool>) -> Result<()> {
        if cells.len() > self.lmax {
            return Err(Error::Capacity(format!("table of length {} does not fit {} cells", cells.len(), self.lmax)));
        }
        out.extend((0..self.lmax).map(|i| cells.get(i).is_some_and(|&c| c == 1)));
        Ok(())
    }

    fn take_table(&self, bits: &[bool]) -> Result<(Vec<u32>, usize)> {
        if bits.len() < self.lmax {
            return Err(Error::Framing(format!("expected {} table bits, got {}", self.lmax, bits.len())));
        }
        Ok((bits[..self.lmax].iter().map(|&b| b as u32).collect(), self.lmax))
    }

    fn message_len(&self, _hd: &HDescriptor, flag: Option<DynFlag>) -> usize {
        self.lmax + 2 + flag.is_some() as usize
    }
}

/// `00` / `01` per cell and a `11` terminator; no size knowledge needed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UnknownN;

impl WireCoding for UnknownN {
    fn name(&self) -> &'static str {
        "unknown"
    }

    fn put_table(&self, cells: &[u32], out: &mut Vec<bool>) -> Result<()> {
        for &c in cells {
            out.extend([false, c == 1]);
        }
        out.extend([true, true]);
        Ok(())
    }

    fn take_table(&self, bits: &[bool]) -> Result<(Vec<u32>, usize)> {
        let mut cells = Vec::new();
        for (i, pair) in bits.chunks(2).enumerate() {
            match pair {
                [false, b] => cells.push(*b as u32),
                [true, true] => return Ok((cells, 2 * i + 2)),
                [true, false] => return Err(Error::Framing(format!("symbol 10 at table position {}", i + 1))),
                _ => break,
            }
        }
        Err(Error::Framing("table terminator 11 missing".into()))
    }

    fn message_len(&self, hd: &HDescriptor, flag: Option<DynFlag>) -> usize {
        2 * wire_cells(hd).len() + 4 + flag.is_some() as usize
    }
}

/// Table as written on the wire: minimal cells plus the artificial 1.
fn wire_cells(hd: &HDescriptor) -> Vec<u32> {
    let mut cells = hd.table.cells().to_vec();
    if hd.vect.pn >= 1 {
        let p = hd.vect.pn as usize;
        if cells.len() < p {
            cells.resize(p, 0);
        }
        cells[p - 1] = 1;
    }
    cells
}

fn ab_bits(v: Vect) -> Result<[bool; 2]> {
    Ok(match (v.pn, v.pn_plus - v.pn) {
        (-1, 0) => [false, false],
        (0, 0) => [false, true],
        (p, 0) if p >= 1 => [true, false],
        (p, 1) if p >= 1 => [true, true],
        _ => return Err(Error::Contract(format!("vector {v} has no wire code"))),
    })
}

/// Encode `hd`, prefixed by the dynamic-mode flag when one is given.
pub fn encode(hd: &HDescriptor, coding: &dyn WireCoding, flag: Option<DynFlag>) -> Result<WireMessage> {
    hd.validate()?;
    if !hd.is_binary() {
        return Err(Error::Contract(format!("only minimal descriptors are sent, got {hd}")));
    }
    let mut bits = Vec::with_capacity(coding.message_len(hd, flag));
    if let Some(f) = flag {
        bits.push(f.bit());
    }
    coding.put_table(&wire_cells(hd), &mut bits)?;
    bits.extend(ab_bits(hd.vect)?);
    Ok(WireMessage { bits })
}

/// Inverse of [`encode`]. `dynamic` says whether a flag bit leads.
pub fn decode(msg: &WireMessage, coding: &dyn WireCoding, dynamic: bool) -> Result<(Option<DynFlag>, HDescriptor)> {
    let mut bits = msg.bits.as_slice();
    let flag = if dynamic {
        let (&first, rest) = bits.split_first().ok_or_else(|| Error::Framing("empty message".into()))?;
        bits = rest;
        Some(if first { DynFlag::ChangeRoot } else { DynFlag::Replace })
    } else {
        None
    };
    let (mut cells, used) = coding.take_table(bits)?;
    let ab = &bits[used..];
    if ab.len() != 2 {
        return Err(Error::Framing(format!("expected 2 trailing vector bits, got {}", ab.len())));
    }
    let vect = match (ab[0], ab[1]) {
        (false, false) => Vect::NONE,
        (false, true) => Vect::stable(0),
        (true, plus) => {
            let first = cells.iter().position(|&c| c == 1).ok_or_else(|| Error::Framing("a=1 but the table has no 1".into()))?;
            cells[first] = 0;
            let pn = first as i32 + 1;
            Vect::new(pn, pn + plus as i32)
        }
    };
    let hd = HDescriptor::new(vect, HdTable::from_cells(cells)).normalized();
    hd.validate().map_err(|e| Error::Framing(e.to_string()))?;
    Ok((flag, hd))
}

/// Payload of a change-root notification.
pub fn change_root_payload() -> HDescriptor {
    HDescriptor::new(Vect::NONE, HdTable::new())
}

/// Coding registered under `name` (`known`, `unknown`) for `n`-vertex trees.
pub fn coding_by_name(name: &str, n: usize, variant: ParamVariant) -> Option<Box<dyn WireCoding>> {
    match name {
        "known" => Some(Box::new(KnownN::for_tree(n, variant))),
        "unknown" => Some(Box::new(UnknownN)),
        _ => None,
    }
}
