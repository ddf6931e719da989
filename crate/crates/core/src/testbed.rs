//! Shared fixtures for unit tests: the blown-up Enriques configuration of
//! the main construction, built through the public API.

use crate::config::{Configuration, PointSpec, Provenance};
use crate::exactalg::FinAbGroup;
use crate::tsingular::Chain;

/// The Enriques surface with the curves and intersection points that the
/// main construction touches: the `I8 + I2` elliptic fibration components
/// that get contracted, the two bisections, and the curve `E8` used for a
/// boundary relation.
pub fn enriques_y() -> Configuration {
    let mut y = Configuration::new("Y", 0, 10, FinAbGroup::cyclic_u64(2));
    for name in ["E16", "E2", "E3", "E4", "E5", "E6", "E11", "E19", "E8"] {
        y.add_curve(name, 0, -2).unwrap();
    }
    let points: [(&str, [&str; 2]); 11] = [
        ("E2xE16_1", ["E2", "E16"]),
        ("E2xE16_2", ["E2", "E16"]),
        ("E16xE19_1", ["E16", "E19"]),
        ("E16xE19_2", ["E16", "E19"]),
        ("E11xE16_1", ["E11", "E16"]),
        ("E11xE16_2", ["E11", "E16"]),
        ("E8xE11_1", ["E8", "E11"]),
        ("E8xE11_2", ["E8", "E11"]),
        ("E2xE3", ["E2", "E3"]),
        ("E3xE4", ["E3", "E4"]),
        ("E4xE5", ["E4", "E5"]),
    ];
    for (name, [a, b]) in points {
        y.add_point(name, &[(a, 1), (b, 1)], Provenance::Text, None).unwrap();
    }
    y.add_point("E5xE6", &[("E5", 1), ("E6", 1)], Provenance::Text, None).unwrap();
    y
}

/// Blow up the five construction points and bind the three chains
/// `[7,3,2,2,2,2]`, `[4]`, `[4]`.
pub fn main_z() -> (Configuration, Vec<Chain>) {
    let mut z = enriques_y();
    for (point, name) in [
        ("E2xE16_1", "e1"),
        ("E16xE19_1", "e2"),
        ("E16xE19_2", "e3"),
        ("E11xE16_1", "e4"),
        ("E11xE16_2", "e5"),
    ] {
        let (next, _) = z.blow_up(&PointSpec::Existing(point.into()), name).unwrap();
        z = next;
    }
    let chain = |names: &[&str]| {
        let ids: Vec<_> = names.iter().map(|n| z.curve_id(n).unwrap()).collect();
        Chain::bind(&z, &ids).unwrap()
    };
    let chains = vec![
        chain(&["E16", "E2", "E3", "E4", "E5", "E6"]),
        chain(&["E11"]),
        chain(&["E19"]),
    ];
    (z, chains)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_z_reproduces_chain_self_intersections() {
        let (z, chains) = main_z();
        assert!(z.validate().is_empty());
        assert_eq!(z.k2(), -5);
        assert_eq!(z.b2(), 15);
        let selfs: Vec<i64> = ["E16", "E2", "E3", "E4", "E5", "E6", "E11", "E19"]
            .iter()
            .map(|n| z.curve(z.curve_id(n).unwrap()).self_int)
            .collect();
        assert_eq!(selfs, vec![-7, -3, -2, -2, -2, -2, -4, -4]);
        assert_eq!(chains[0].coeffs(), &[7, 3, 2, 2, 2, 2]);
        assert_eq!(chains[1].coeffs(), &[4]);
        assert_eq!(chains[2].coeffs(), &[4]);

        // stated intersections survive the blow-ups
        let id = |n: &str| z.curve_id(n).unwrap();
        assert_eq!(z.intersection_number(id("E11"), id("E8")).unwrap(), 2);
        assert_eq!(z.intersection_number(id("e2"), id("E16")).unwrap(), 1);
        assert_eq!(z.intersection_number(id("e2"), id("E19")).unwrap(), 1);
        assert_eq!(z.intersection_number(id("e4"), id("E16")).unwrap(), 1);
        assert_eq!(z.intersection_number(id("e4"), id("E11")).unwrap(), 1);
        assert_eq!(z.intersection_number(id("e1"), id("E2")).unwrap(), 1);
        assert_eq!(z.intersection_number(id("E16"), id("E19")).unwrap(), 0);
        assert_eq!(z.intersection_number(id("E16"), id("E11")).unwrap(), 0);
    }
}
