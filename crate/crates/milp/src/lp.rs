use std::fmt::Write;

use crate::error::{MilpError, Result};
use crate::model::{MilpModel, VarKind};

const OBJECTIVE_NAME: &str = "obj";
const TERMS_PER_LINE: usize = 10;

/// Formats a coefficient: integral values without a fraction, everything
/// else with 17 significant digits.
pub fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let s = format!("{v:.16e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    if exp == "0" {
        mantissa.to_string()
    } else {
        format!("{mantissa}e{exp}")
    }
}

fn write_terms(out: &mut String, model: &MilpModel, terms: &[(usize, f64)]) {
    let vars = model.variables();
    let nonzero: Vec<&(usize, f64)> = terms.iter().filter(|(_, a)| *a != 0.0).collect();
    if nonzero.is_empty() {
        let _ = write!(out, "0 {}", vars[terms.first().map_or(0, |t| t.0)].name);
        return;
    }
    for (k, &&(v, a)) in nonzero.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if a < 0.0 { "-" } else { "+" };
        if k > 0 {
            out.push(' ');
        }
        if k > 0 || a < 0.0 {
            out.push_str(sign);
            out.push(' ');
        }
        if a.abs() != 1.0 {
            out.push_str(&format_number(a.abs()));
            out.push(' ');
        }
        out.push_str(&vars[v].name);
    }
}

/// Largest objective coefficient written verbatim. Some solvers read bigger
/// numbers as infinite.
pub const MAX_OBJECTIVE_COEFFICIENT: f64 = (1u64 << 30) as f64;

/// Power of two the objective is multiplied by in the LP text, so that no
/// coefficient exceeds [`MAX_OBJECTIVE_COEFFICIENT`]. Exact in binary
/// floating point, so the argmin is unchanged.
pub fn objective_scale(model: &MilpModel) -> f64 {
    let largest = model
        .objective()
        .iter()
        .fold(0.0f64, |m, &(_, a)| m.max(a.abs()));
    let mut scale = 1.0;
    while largest * scale > MAX_OBJECTIVE_COEFFICIENT {
        scale /= 2.0;
    }
    scale
}

/// Writes `model` in CPLEX LP format, variables in declaration order. The
/// objective is multiplied by [`objective_scale`].
pub fn emit_lp(model: &MilpModel) -> Result<String> {
    if model.n_variables() == 0 {
        return Err(MilpError::InvalidArgument(
            "cannot write a model without variables".into(),
        ));
    }
    if model.constraint(OBJECTIVE_NAME).is_some() {
        return Err(MilpError::DuplicateName(OBJECTIVE_NAME.into()));
    }
    let mut out = String::from("Minimize\n obj: ");
    let scale = objective_scale(model);
    let objective: Vec<(usize, f64)> = model
        .objective()
        .iter()
        .map(|&(v, a)| (v, a * scale))
        .collect();
    write_terms(&mut out, model, &objective);
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}: ", c.name);
        write_terms(&mut out, model, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense.symbol(), format_number(c.rhs));
    }
    let general: Vec<_> = model
        .variables()
        .iter()
        .filter(|v| v.kind == VarKind::Integer)
        .collect();
    if !general.is_empty() {
        out.push_str("Bounds\n");
        for v in &general {
            let _ = writeln!(
                out,
                " {} <= {} <= {}",
                format_number(v.lower),
                v.name,
                format_number(v.upper)
            );
        }
    }
    for (header, kind) in [("Binary", VarKind::Binary), ("General", VarKind::Integer)] {
        let names: Vec<&str> = model
            .variables()
            .iter()
            .filter(|v| v.kind == kind)
            .map(|v| v.name.as_str())
            .collect();
        if names.is_empty() {
            continue;
        }
        out.push_str(header);
        out.push('\n');
        for chunk in names.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sense;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(3.0), "3");
        assert_eq!(format_number(-2.0), "-2");
        assert_eq!(format_number(0.5), "5e-1");
        assert_eq!(format_number(10f64.log2()), "3.3219280948873622");
        for v in [10f64.log2(), -0.1f64.log2(), 1e-7, 123456.789] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn single_binary_golden() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        m.add_constraint("c0", vec![(x, 1.0)], Sense::Ge, 0.0)
            .unwrap();
        m.set_objective(vec![(x, 1.0)]).unwrap();
        let golden = "Minimize\n obj: x\nSubject To\n c0: x >= 0\nBinary\n x\nEnd\n";
        assert_eq!(emit_lp(&m).unwrap(), golden);
    }

    #[test]
    fn signs_bounds_and_sections() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        let y = m.add_variable("y", VarKind::Integer, 0.0, 4.0).unwrap();
        m.add_constraint("c", vec![(x, -1.0), (y, 2.5), (x, 0.0)], Sense::Le, -1.0)
            .unwrap();
        m.add_constraint("z", vec![(x, 0.0)], Sense::Eq, 0.0)
            .unwrap();
        let text = emit_lp(&m).unwrap();
        assert!(text.contains(" obj: 0 x\n"), "{text}");
        assert!(text.contains(" c: - x + 2.5 y <= -1\n"), "{text}");
        assert!(text.contains(" z: 0 x = 0\n"));
        assert!(text.contains("Bounds\n 0 <= y <= 4\nBinary\n x\nGeneral\n y\nEnd\n"));
    }

    #[test]
    fn objective_name_collision_is_rejected() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        m.add_constraint("obj", vec![(x, 1.0)], Sense::Le, 1.0)
            .unwrap();
        assert!(matches!(emit_lp(&m), Err(MilpError::DuplicateName(_))));
    }

    #[test]
    fn large_objectives_are_scaled_by_a_power_of_two() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        let y = m.add_binary("y").unwrap();
        m.set_objective(vec![(x, 3.0 * 2f64.powi(70)), (y, 2f64.powi(40))])
            .unwrap();
        assert_eq!(objective_scale(&m), 2f64.powi(-42));
        let text = emit_lp(&m).unwrap();
        assert!(text.contains(" obj: 805306368 x + 2.5e-1 y\n"), "{text}");
        m.set_objective(vec![(x, 5.0)]).unwrap();
        assert_eq!(objective_scale(&m), 1.0);
    }
}
