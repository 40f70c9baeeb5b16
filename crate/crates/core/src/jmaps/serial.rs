//! JSON serialization of map families: `{algebra, m, r, images}` with
//! images as nested arrays (complex entries as [re, im] pairs).

use serde::{Deserialize, Serialize};

use super::{CMapFamily, FamilyImages, JMapFamily, TorusModel};
use crate::liealg::{SkewSymmetric, SuElement, SymTraceless3};
use crate::numkit::C64;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FamilyDoc {
    algebra: String,
    m: usize,
    r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<usize>,
    /// so / sym0: real entries; su: [re, im] pairs.
    images: serde_json::Value,
}

/// Families the CLI can reference by file path or the built-in name.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyFamily {
    J(JMapFamily),
    C(CMapFamily),
}

pub fn family_to_json(fam: &AnyFamily) -> Result<String> {
    let doc = match fam {
        AnyFamily::J(j) => {
            let (algebra, m, images) = match &j.images {
                FamilyImages::So(v) => (
                    "so".to_string(),
                    v[0].m(),
                    serde_json::to_value(
                        v.iter()
                            .map(|x| {
                                (0..x.m())
                                    .map(|i| (0..x.m()).map(|jj| x.get(i, jj)).collect::<Vec<_>>())
                                    .collect::<Vec<_>>()
                            })
                            .collect::<Vec<_>>(),
                    )?,
                ),
                FamilyImages::Su(v) => (
                    "su".to_string(),
                    v[0].m(),
                    serde_json::to_value(
                        v.iter()
                            .map(|x| {
                                (0..x.m())
                                    .map(|i| {
                                        (0..x.m())
                                            .map(|jj| {
                                                let z = x.get(i, jj);
                                                [z.re, z.im]
                                            })
                                            .collect::<Vec<_>>()
                                    })
                                    .collect::<Vec<_>>()
                            })
                            .collect::<Vec<_>>(),
                    )?,
                ),
            };
            FamilyDoc { algebra, m, r: j.torus.r, split: j.split, images }
        }
        AnyFamily::C(c) => FamilyDoc {
            algebra: "sym0".into(),
            m: 3,
            r: 2,
            split: None,
            images: serde_json::to_value(
                c.images
                    .iter()
                    .map(|x| {
                        (0..3)
                            .map(|i| (0..3).map(|jj| x.get(i, jj)).collect::<Vec<_>>())
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>(),
            )?,
        },
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn family_from_json(text: &str) -> Result<AnyFamily> {
    let doc: FamilyDoc = serde_json::from_str(text)?;
    let torus = TorusModel::new(doc.r);
    match doc.algebra.as_str() {
        "so" => {
            let raw: Vec<Vec<Vec<f64>>> = serde_json::from_value(doc.images)?;
            if raw.len() != doc.r {
                return Err(Error::InvalidConfig(format!(
                    "expected {} images, got {}",
                    doc.r,
                    raw.len()
                )));
            }
            let images = raw
                .iter()
                .map(|rows| {
                    let mut x = SkewSymmetric::zeros(doc.m);
                    for i in 0..doc.m {
                        for j in i + 1..doc.m {
                            x.set(i, j, 0.5 * (rows[i][j] - rows[j][i]));
                        }
                    }
                    x
                })
                .collect();
            let mut fam = JMapFamily::so(torus, images);
            fam.split = doc.split;
            Ok(AnyFamily::J(fam))
        }
        "su" => {
            let raw: Vec<Vec<Vec<[f64; 2]>>> = serde_json::from_value(doc.images)?;
            let images = raw
                .iter()
                .map(|rows| {
                    let m = doc.m;
                    let cm = crate::numkit::CMat::from_fn(m, m, |i, j| {
                        C64::new(rows[i][j][0], rows[i][j][1])
                    });
                    SuElement::from_cmat(&cm)
                })
                .collect();
            let mut fam = JMapFamily::su(torus, images);
            fam.split = doc.split;
            Ok(AnyFamily::J(fam))
        }
        "sym0" => {
            let raw: Vec<Vec<Vec<f64>>> = serde_json::from_value(doc.images)?;
            if raw.len() != 2 {
                return Err(Error::InvalidConfig("sym0 family needs exactly 2 images".into()));
            }
            let to_sym = |rows: &Vec<Vec<f64>>| {
                SymTraceless3::new(rows[0][0], rows[0][1], rows[0][2], rows[1][1], rows[1][2])
            };
            Ok(AnyFamily::C(CMapFamily::new([to_sym(&raw[0]), to_sym(&raw[1])])))
        }
        other => Err(Error::InvalidConfig(format!("unknown algebra tag {other:?}"))),
    }
}
