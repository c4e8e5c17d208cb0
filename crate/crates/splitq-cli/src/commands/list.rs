//! `list-profiles`: the built-in bias-profile table.

use splitq::BiasProfile;

fn weight_cell(mean: f64, half_width: f64) -> String {
    if half_width > 0.0 {
        format!("{mean} ± {half_width}")
    } else {
        format!("{mean}")
    }
}

/// Renders the preset table, one row per profile.
pub fn profile_table() -> String {
    let mut out = format!(
        "{:<10} {:<44} {:>12} {:>12} {:>12} {:>12}\n",
        "label", "description", "phi1", "phi2", "phi3", "phi4"
    );
    for p in BiasProfile::presets() {
        let description = BiasProfile::preset_description(&p.label).unwrap_or("");
        out.push_str(&format!(
            "{:<10} {:<44} {:>12} {:>12} {:>12} {:>12}\n",
            p.label,
            description,
            weight_cell(p.phi1, p.ranges[0]),
            weight_cell(p.phi2, p.ranges[1]),
            weight_cell(p.phi3, p.ranges[2]),
            weight_cell(p.phi4, p.ranges[3]),
        ));
    }
    out
}

pub fn cmd_list_profiles() {
    print!("{}", profile_table());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_the_preset_means_and_ranges() {
        let table = profile_table();
        let rows: Vec<&str> = table.lines().skip(1).collect();
        assert_eq!(rows.len(), 8);

        let pd = rows.iter().find(|r| r.starts_with("PD")).unwrap();
        for cell in ["0.5 ± 0.1", "1 ± 0.1", "100 ± 10"] {
            assert!(pd.contains(cell), "PD row missing '{cell}': {pd}");
        }

        let standard = rows.iter().find(|r| r.starts_with("standard")).unwrap();
        assert!(!standard.contains('±'), "standard row must carry no ranges");
        assert!(standard.contains('1'));

        let bvftd = rows.iter().find(|r| r.starts_with("bvFTD")).unwrap();
        assert!(bvftd.contains("100 ± 10"));
    }
}
