//! `SPF1` binary snapshots and `k,re,im` CSV export.
//!
//! Layout: `b"SPF1"`, little-endian `u32` header holding `K` in its low 31
//! bits and a time-tag flag in bit 31, `K` pairs of `f64` `(re, im)` for
//! `k = 1..K`, then the `f64` time tag when flagged.

use std::io::{Read, Write};

use num_complex::Complex;

use crate::error::{Result, SpectralError};
use crate::field::SpectralField;
use crate::real::Real;

pub const SPF1_MAGIC: &[u8; 4] = b"SPF1";
const TIME_TAG_FLAG: u32 = 1 << 31;

pub fn write_spf1<T: Real, W: Write>(mut w: W, field: &SpectralField<T>) -> Result<()> {
    let k = u32::try_from(field.cutoff())
        .ok()
        .filter(|k| k & TIME_TAG_FLAG == 0)
        .ok_or_else(|| SpectralError::Format("cutoff too large for SPF1".into()))?;
    let header = if field.time_tag().is_some() {
        k | TIME_TAG_FLAG
    } else {
        k
    };
    w.write_all(SPF1_MAGIC)?;
    w.write_all(&header.to_le_bytes())?;
    for c in field.coeffs() {
        w.write_all(&c.re.as_f64().to_le_bytes())?;
        w.write_all(&c.im.as_f64().to_le_bytes())?;
    }
    if let Some(t) = field.time_tag() {
        w.write_all(&t.as_f64().to_le_bytes())?;
    }
    Ok(())
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_spf1<T: Real, R: Read>(mut r: R) -> Result<SpectralField<T>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SPF1_MAGIC {
        return Err(SpectralError::Format(format!("bad magic {magic:?}")));
    }
    let mut hb = [0u8; 4];
    r.read_exact(&mut hb)?;
    let header = u32::from_le_bytes(hb);
    let k = (header & !TIME_TAG_FLAG) as usize;
    let mut coeffs = Vec::with_capacity(k);
    for _ in 0..k {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        coeffs.push(Complex::new(T::lit(re), T::lit(im)));
    }
    let mut field = SpectralField::from_coeffs(coeffs)?;
    if header & TIME_TAG_FLAG != 0 {
        field.set_time_tag(Some(T::lit(read_f64(&mut r)?)));
    }
    Ok(field)
}

pub fn write_field_csv<T: Real, W: Write>(w: W, field: &SpectralField<T>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k", "re", "im"])?;
    for (i, c) in field.coeffs().iter().enumerate() {
        out.write_record([
            (i + 1).to_string(),
            c.re.as_f64().to_string(),
            c.im.as_f64().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn byte_layout() {
        let f = SpectralField::single_mode(2, 1, Complex::new(1.5, -2.0)).with_time_tag(0.25);
        let mut buf = Vec::new();
        write_spf1(&mut buf, &f).unwrap();
        assert_eq!(&buf[..4], b"SPF1");
        assert_eq!(
            u32::from_le_bytes(buf[4..8].try_into().unwrap()),
            2 | (1 << 31)
        );
        assert_eq!(buf.len(), 8 + 2 * 16 + 8);
        assert_eq!(f64::from_le_bytes(buf[8..16].try_into().unwrap()), 1.5);
    }

    #[test]
    fn bad_magic() {
        assert!(read_spf1::<f64, _>(&b"SPF2\0\0\0\0"[..]).is_err());
    }

    #[test]
    fn csv_columns() {
        let f = SpectralField::single_mode(2, 2, Complex::new(0.5, 1.0));
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &f).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,re,im\n1,0,0\n2,0.5,1\n");
    }

    proptest! {
        #[test]
        fn round_trip(vals in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..50), tag in prop::option::of(0.0f64..100.0)) {
            let mut f = SpectralField::from_coeffs(vals.iter().map(|&(a, b)| Complex::new(a, b)).collect()).unwrap();
            f.set_time_tag(tag);
            let mut buf = Vec::new();
            write_spf1(&mut buf, &f).unwrap();
            let g: SpectralField<f64> = read_spf1(&buf[..]).unwrap();
            prop_assert_eq!(f, g);
        }
    }
}
