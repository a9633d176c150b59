//! CSV writers for frames and range-velocity images.

use std::io::Write;

use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::rxproc::RangeVelocityImage;

/// One line per row: `row,re_0,im_0,re_1,im_1,...` with one pair per column.
pub fn matrix_to_csv<W: Write>(x: &ComplexMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["row".to_string()];
    for c in 0..x.cols() {
        header.push(format!("re_{c}"));
        header.push(format!("im_{c}"));
    }
    w.write_record(&header)?;
    for r in 0..x.rows() {
        let mut rec = Vec::with_capacity(1 + 2 * x.cols());
        rec.push(r.to_string());
        for c in 0..x.cols() {
            let z = x.get(r, c);
            rec.push(z.re.to_string());
            rec.push(z.im.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Magnitude grid, one line per range bin and one column per velocity bin.
pub fn image_to_csv<W: Write>(img: &RangeVelocityImage, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["range_bin".to_string()];
    header.extend((0..img.cols()).map(|c| format!("v{c}")));
    w.write_record(&header)?;
    for r in 0..img.rows() {
        let mut rec = vec![r.to_string()];
        rec.extend((0..img.cols()).map(|c| img.magnitude(r, c).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Single-column axis file `bin,<name>`.
pub fn axis_to_csv<W: Write>(name: &str, axis: &[f64], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["bin", name])?;
    for (i, v) in axis.iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn matrix_layout() {
        let x = ComplexMatrix::from_fn(2, 2, |r, c| Complex64::new(r as f64, c as f64));
        let mut out = Vec::new();
        matrix_to_csv(&x, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "row,re_0,im_0,re_1,im_1");
        assert_eq!(lines[2], "1,1,0,1,1");
    }

    #[test]
    fn image_layout() {
        let img = RangeVelocityImage::new(
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            vec![0.0, 0.15],
            vec![-1.0, 0.0, 1.0],
        )
        .unwrap();
        let mut out = Vec::new();
        image_to_csv(&img, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().nth(2).unwrap(), "1,4,5,6");
        let mut out = Vec::new();
        axis_to_csv("velocity_mps", img.velocity_axis_mps(), &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().starts_with("bin,velocity_mps\n0,-1\n"));
    }
}
