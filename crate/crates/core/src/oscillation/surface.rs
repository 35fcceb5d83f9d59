use std::io::{self, Write};

/// One sampled fiber norm.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint {
    pub component: u128,
    pub theta: Vec<f64>,
    pub norm: f64,
}

/// `%.12g`: 12 significant digits, shortest of fixed and exponent notation,
/// trailing zeros removed.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x)).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header `component,theta_1,…,theta_r,norm`, then one row per point.
pub fn write_surface_csv<W: Write>(mut w: W, r: usize, points: &[SurfacePoint]) -> io::Result<()> {
    let mut header = vec!["component".to_string()];
    header.extend((1..=r).map(|i| format!("theta_{i}")));
    header.push("norm".into());
    writeln!(w, "{}", header.join(","))?;
    for p in points {
        let mut row = vec![p.component.to_string()];
        row.extend(p.theta.iter().map(|&t| format_sig12(t)));
        row.push(format_sig12(p.norm));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
