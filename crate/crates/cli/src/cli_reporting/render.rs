use std::fmt::Write;

use super::result::{
    ComplexValue, FaceStatus, Int, JobResult, LoopDirection, PairingEntry, ResonanceState, ScalarValue,
};

pub const RESONANCE_BANNER: &str = "WARNING: c is resonant; Theorem hypotheses not met";

/// Pretty JSON with a trailing newline; field order is fixed by the types.
pub fn render_json(result: &JobResult) -> String {
    let mut out = serde_json::to_string_pretty(result).expect("results serialize");
    out.push('\n');
    out
}

pub fn parse_result(text: &str) -> serde_json::Result<JobResult> {
    serde_json::from_str(text)
}

pub(crate) fn fmt_point(p: &[Int]) -> String {
    let coords: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("({})", coords.join(", "))
}

fn fmt_face(face: &[Vec<Int>]) -> String {
    let pts: Vec<String> = face.iter().map(|p| fmt_point(p)).collect();
    format!("conv{{{}}}", pts.join(", "))
}

fn fmt_complex(z: &ComplexValue) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

fn fmt_scalar(s: &ScalarValue) -> String {
    match s {
        ScalarValue::Rational(q) => q.clone(),
        ScalarValue::Complex(z) => fmt_complex(z),
    }
}

/// Display width, ignoring combining marks such as the hat in `Δ̂`.
fn width(s: &str) -> usize {
    s.chars().filter(|c| !('\u{300}'..='\u{36f}').contains(c)).count()
}

fn pad(s: &str, width: usize) -> String {
    let len = self::width(s);
    format!("{s}{}", " ".repeat(width.saturating_sub(len)))
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> Vec<String> {
    let mut widths: Vec<usize> = headers.iter().map(|h| width(h)).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(width(cell));
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| pad(c, *w)).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = vec![line(headers.to_vec())];
    out.extend(rows.iter().map(|r| line(r.iter().map(String::as_str).collect())));
    out
}

fn fmt_pairing(p: &PairingEntry) -> String {
    format!(
        "⟨ρ, c⟩ = {} on {} with ρ = {}",
        fmt_scalar(&p.pairing),
        fmt_face(&p.facet),
        fmt_point(&p.normal)
    )
}

/// Human-readable report. Same result, same text.
pub fn render_text(result: &JobResult) -> String {
    let mut out = String::new();
    if result.any_resonant() {
        writeln!(out, "{RESONANCE_BANNER}").unwrap();
        out.push('\n');
    }
    let input = &result.input;
    let poly = &result.polytope;
    let a: Vec<String> = input.a.iter().map(|p| fmt_point(p)).collect();
    let c: Vec<String> = input.c.iter().map(fmt_scalar).collect();
    let direction = match input.orientation {
        LoopDirection::Ccw => "counterclockwise",
        LoopDirection::Cw => "clockwise",
    };
    writeln!(out, "ahg {}", result.version).unwrap();
    writeln!(out, "A = {{{}}} in Z^{}", a.join(", "), poly.n).unwrap();
    writeln!(out, "c = ({})", c.join(", ")).unwrap();
    writeln!(out, "loop: {direction}").unwrap();
    writeln!(
        out,
        "Δ = conv(A ∪ {{0}}): dim {}, normalized volume {}",
        poly.dim, poly.normalized_volume
    )
    .unwrap();
    let vertices: Vec<String> = poly.vertices.iter().map(|p| fmt_point(p)).collect();
    writeln!(out, "vertices: {}", vertices.join(" ")).unwrap();
    let divisors: Vec<String> = poly.lattice_divisors.iter().map(ToString::to_string).collect();
    writeln!(out, "lattice divisors: [{}]", divisors.join(", ")).unwrap();

    for r in &result.results {
        out.push('\n');
        writeln!(out, "j0 = {}, a(j0) = {}", r.j0, fmt_point(&r.point)).unwrap();
        if r.contributions.is_empty() {
            writeln!(out, "  no facet of Δ through a(j0) avoids the origin").unwrap();
        } else {
            let mut rows = Vec::new();
            for (i, contribution) in r.contributions.iter().enumerate() {
                for (k, s) in contribution.sub_facets.iter().enumerate() {
                    let head = if k == 0 {
                        vec![
                            format!("Δ_{}", i + 1),
                            fmt_face(&contribution.facet),
                            contribution.vol_delta_hat.to_string(),
                        ]
                    } else {
                        vec![String::new(); 3]
                    };
                    let mut row = head;
                    row.extend([
                        format!("Γ_{}{}", i + 1, k + 1),
                        fmt_face(&s.face),
                        fmt_point(&s.rho),
                        s.height.to_string(),
                        s.vol_gamma_hat.to_string(),
                    ]);
                    rows.push(row);
                }
            }
            let headers = ["facet", "vertices", "Vol(Δ̂)", "sub-facet", "vertices", "ρ", "h", "Vol(Γ̂)"];
            for line in table(&headers, &rows) {
                writeln!(out, "  {line}").unwrap();
            }
        }
        writeln!(out, "  λ(t) = {}", r.char_poly).unwrap();
        writeln!(out, "  degree {}, (t − 1) exponent {}", r.degree, r.t_minus_one_exponent).unwrap();
        match r.resonance.status {
            ResonanceState::NonResonant => writeln!(out, "  resonance: non-resonant").unwrap(),
            ResonanceState::Resonant => {
                let witness = r.resonance.witness.as_ref().map(fmt_pairing).unwrap_or_default();
                writeln!(out, "  resonance: resonant, {witness}").unwrap();
            }
            ResonanceState::NearIntegerWarning => {
                writeln!(out, "  resonance: non-resonant with near-integer pairings").unwrap();
                for w in &r.resonance.warnings {
                    writeln!(out, "    {} (distance {:.1e})", fmt_pairing(w), w.distance_to_integer).unwrap();
                }
            }
        }
        if !r.theorem_hypotheses_met {
            writeln!(out, "  hypotheses not met").unwrap();
        }
    }

    if let Some(nd) = &result.nondegeneracy {
        out.push('\n');
        writeln!(out, "non-degeneracy: {}", fmt_status(&nd.overall)).unwrap();
        for f in &nd.faces {
            writeln!(out, "  dim {} {}: {}", f.dim, fmt_face(&f.vertices), fmt_status(&f.verdict)).unwrap();
        }
    }

    if let Some(v) = &result.verify {
        out.push('\n');
        writeln!(
            out,
            "verify {} (j0 = {}): {}",
            v.catalog,
            v.j0,
            if v.passed { "PASS" } else { "FAIL" }
        )
        .unwrap();
        writeln!(out, "  radius {}, tolerance {:e}, {} steps ({} rejected)", v.radius, v.tol, v.accepted_steps, v.rejected_steps).unwrap();
        writeln!(out, "  engine:  {}", v.engine_char_poly).unwrap();
        let eig: Vec<String> = v.numeric_eigenvalues.iter().map(fmt_complex).collect();
        writeln!(out, "  numeric eigenvalues: {}", eig.join(", ")).unwrap();
        match v.max_distance {
            Some(d) => writeln!(out, "  max distance {d:.3e} (tolerance {:e})", v.match_tolerance).unwrap(),
            None => writeln!(out, "  eigenvalue counts differ").unwrap(),
        }
    }
    out
}

fn fmt_status(s: &FaceStatus) -> String {
    match s {
        FaceStatus::Nondegenerate => "non-degenerate".into(),
        FaceStatus::Degenerate(d) => format!("degenerate ({d})"),
        FaceStatus::Unchecked(d) => format!("unchecked ({d})"),
    }
}
