//! Flat `key = value` files for filter designs and synthesis targets.
//!
//! One pair per line; `#` starts a comment. Unknown or repeated keys are
//! errors, missing keys fall back to a default where one exists.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{HerdError, Result};
use crate::model::{
    validate, CoaxGeometry, FilterDesign, Material, ModeAxis, RectAperture, DEFAULT_APERTURES_PER_SECTION,
    DEFAULT_SECTION_PITCH, DEFAULT_STOPBAND_KAPPA,
};
use crate::synthesis::DesignSpec;

/// Keys of a design file, in canonical order.
pub const DESIGN_KEYS: [&str; 12] = [
    "a_m",
    "b_m",
    "d_m",
    "r_inner_m",
    "r_outer_m",
    "coax_eps_r",
    "aperture_eps_r",
    "apertures_per_section",
    "sections",
    "section_pitch_m",
    "stopband_kappa",
    "dominant_mode_axis",
];

/// Keys of a synthesis spec file, in canonical order.
pub const SPEC_KEYS: [&str; 8] = [
    "z0_ohm",
    "f_passband_top_hz",
    "passband_il_budget_db",
    "f_stopband_start_hz",
    "stopband_min_attenuation_db",
    "aperture_eps_r",
    "coax_eps_r",
    "apertures_per_section",
];

struct KvFile {
    values: BTreeMap<String, (usize, String)>,
}

impl KvFile {
    fn parse(text: &str, allowed: &[&str]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HerdError::parse(line_no, format!("expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !allowed.contains(&key) {
                return Err(HerdError::parse(line_no, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(HerdError::parse(line_no, format!("key `{key}` has no value")));
            }
            if values.insert(key.to_string(), (line_no, value.to_string())).is_some() {
                return Err(HerdError::parse(line_no, format!("duplicate key `{key}`")));
            }
        }
        Ok(KvFile { values })
    }

    fn get<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            Some((line, raw)) => raw
                .parse()
                .map_err(|e| HerdError::parse(*line, format!("bad value for `{key}`: {e}"))),
            None => default.ok_or_else(|| HerdError::MissingKey(key.to_string())),
        }
    }
}

/// Reads a design file and checks every design invariant.
pub fn parse_design(text: &str) -> Result<FilterDesign> {
    let kv = KvFile::parse(text, &DESIGN_KEYS)?;
    let design = FilterDesign {
        aperture: RectAperture {
            width_a: kv.get("a_m", None)?,
            height_b: kv.get("b_m", None)?,
            depth_d: kv.get("d_m", None)?,
        },
        coax: CoaxGeometry {
            r_inner: kv.get("r_inner_m", None)?,
            r_outer: kv.get("r_outer_m", None)?,
        },
        coax_fill: Material::dielectric(kv.get("coax_eps_r", Some(1.0))?),
        aperture_fill: Material::dielectric(kv.get("aperture_eps_r", Some(1.0))?),
        apertures_per_section: kv.get("apertures_per_section", Some(DEFAULT_APERTURES_PER_SECTION))?,
        sections: kv.get("sections", None)?,
        section_pitch: kv.get("section_pitch_m", Some(DEFAULT_SECTION_PITCH))?,
        stopband_kappa: kv.get("stopband_kappa", Some(DEFAULT_STOPBAND_KAPPA))?,
        dominant_mode_axis: kv.get("dominant_mode_axis", Some(ModeAxis::Width))?,
    };
    if let Some(v) = validate(&design).into_iter().next() {
        return Err(HerdError::Domain(v.to_string()));
    }
    Ok(design)
}

/// Serializes a design; values use the shortest exact decimal form so the
/// file reloads to the same numbers.
pub fn write_design(design: &FilterDesign) -> String {
    let mut s = String::from("# herd filter design (SI units)\n");
    let rows: [(&str, String); 12] = [
        ("a_m", design.aperture.width_a.to_string()),
        ("b_m", design.aperture.height_b.to_string()),
        ("d_m", design.aperture.depth_d.to_string()),
        ("r_inner_m", design.coax.r_inner.to_string()),
        ("r_outer_m", design.coax.r_outer.to_string()),
        ("coax_eps_r", design.coax_fill.eps_r.to_string()),
        ("aperture_eps_r", design.aperture_fill.eps_r.to_string()),
        ("apertures_per_section", design.apertures_per_section.to_string()),
        ("sections", design.sections.to_string()),
        ("section_pitch_m", design.section_pitch.to_string()),
        ("stopband_kappa", design.stopband_kappa.to_string()),
        ("dominant_mode_axis", design.dominant_mode_axis.as_str().to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "{k} = {v}");
    }
    s
}

/// Reads a synthesis spec file.
pub fn parse_spec(text: &str) -> Result<DesignSpec> {
    let kv = KvFile::parse(text, &SPEC_KEYS)?;
    Ok(DesignSpec {
        z0: kv.get("z0_ohm", None)?,
        f_passband_top: kv.get("f_passband_top_hz", None)?,
        passband_il_budget_db: kv.get("passband_il_budget_db", None)?,
        f_stopband_start: kv.get("f_stopband_start_hz", None)?,
        stopband_min_attenuation_db: kv.get("stopband_min_attenuation_db", None)?,
        aperture_fill: Material::dielectric(kv.get("aperture_eps_r", Some(1.0))?),
        coax_fill: Material::dielectric(kv.get("coax_eps_r", Some(1.0))?),
        apertures_per_section: kv.get("apertures_per_section", Some(DEFAULT_APERTURES_PER_SECTION))?,
    })
}

pub fn write_spec(spec: &DesignSpec) -> String {
    let mut s = String::from("# herd synthesis targets (SI units)\n");
    let rows: [(&str, String); 8] = [
        ("z0_ohm", spec.z0.to_string()),
        ("f_passband_top_hz", spec.f_passband_top.to_string()),
        ("passband_il_budget_db", spec.passband_il_budget_db.to_string()),
        ("f_stopband_start_hz", spec.f_stopband_start.to_string()),
        ("stopband_min_attenuation_db", spec.stopband_min_attenuation_db.to_string()),
        ("aperture_eps_r", spec.aperture_fill.eps_r.to_string()),
        ("coax_eps_r", spec.coax_fill.eps_r.to_string()),
        ("apertures_per_section", spec.apertures_per_section.to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "{k} = {v}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::prototype_design;

    #[test]
    fn prototype_text_round_trip() {
        let text = write_design(&prototype_design());
        let back = parse_design(&text).unwrap();
        assert_eq!(write_design(&back), text);
        assert_eq!(back.aperture, prototype_design().aperture);
        assert_eq!(back.coax, prototype_design().coax);
    }

    #[test]
    fn defaults_fill_optional_keys() {
        let d = parse_design(
            "a_m = 0.004\nb_m=0.005\n d_m = 0.00485 # depth\nr_inner_m = 0.00159\nr_outer_m = 0.00365\nsections = 4\n",
        )
        .unwrap();
        assert_eq!(d.apertures_per_section, 8);
        assert_eq!(d.stopband_kappa, DEFAULT_STOPBAND_KAPPA);
        assert_eq!(d.dominant_mode_axis, ModeAxis::Width);
        assert_eq!(d.aperture_fill.eps_r, 1.0);
    }

    #[test]
    fn empty_file_names_first_missing_key() {
        assert_eq!(parse_design("# nothing\n"), Err(HerdError::MissingKey("a_m".into())));
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        let base = write_design(&prototype_design());
        let err = parse_design(&format!("{base}colour = red\n")).unwrap_err();
        assert!(matches!(err, HerdError::Parse { line: 14, .. }), "{err}");
        assert!(parse_design(&format!("{base}sections = 3\n")).is_err());
        assert!(parse_design(&format!("{base}just words\n")).is_err());
        let bad = base.replace("sections = 4", "sections = four");
        assert!(matches!(parse_design(&bad), Err(HerdError::Parse { .. })));
        let invalid = base.replace("sections = 4", "sections = 0");
        assert!(matches!(parse_design(&invalid), Err(HerdError::Domain(_))));
    }

    #[test]
    fn spec_round_trip() {
        let spec = DesignSpec::reference();
        let back = parse_spec(&write_spec(&spec)).unwrap();
        assert_eq!(back.z0, 50.0);
        assert_eq!(back.f_stopband_start, 25.3e9);
        assert_eq!(back.aperture_fill.eps_r, 2.2);
        assert!(matches!(parse_spec("z0_ohm = 50\n"), Err(HerdError::MissingKey(k)) if k == "f_passband_top_hz"));
    }
}
