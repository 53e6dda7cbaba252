//! Certificates: the machine-checkable output of every command.
//!
//! A certificate records what was asked, the image(s) involved, the result,
//! and — when the result rests on a concrete object such as a witness map or
//! a found vertex — enough data for an independent party to re-check the
//! claim without re-running any search.  Certificates are emitted as
//! pretty-printed JSON with a fixed field order, integer-only numbers, and no
//! timestamps, so repeated runs with the same inputs are byte-identical.
//!
//! # Image fingerprints
//!
//! The fingerprint ties a certificate to a concrete image independent of how
//! the spec happened to be phrased.  It is the SHA-256 digest, rendered as
//! `sha256:<hex>`, of the following byte string:
//!
//! * the magic `b"AFPPIMG1"`;
//! * the dimension as a little-endian `u64`;
//! * the vertex count as a little-endian `u64`;
//! * every coordinate of every vertex, in the image's canonical vertex
//!   order, each as a little-endian `i64`;
//! * the edge count as a little-endian `u64`;
//! * every adjacent pair `(i, j)` with `i < j`, in lexicographic order of
//!   index pairs, as two little-endian `u64`s.
//!
//! Two specs that elaborate to the same vertices and the same adjacency get
//! the same fingerprint, whatever rule expression produced them.

use crate::spec::ImageSpec;
use afpp_core::maps::{self, DigitalMap};
use afpp_core::products::{np_assoc_check, np_equals_cu};
use afpp_core::{DigitalImage, Point};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// Format tag carried by every certificate.
pub const CERT_FORMAT: &str = "afpp-certificate/1";

/// Computes the canonical fingerprint of an image (layout documented above).
pub fn fingerprint(image: &DigitalImage) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"AFPPIMG1");
    hasher.update((image.dim() as u64).to_le_bytes());
    hasher.update((image.len() as u64).to_le_bytes());
    for point in image.vertices().iter() {
        for &coord in point.coords() {
            hasher.update(coord.to_le_bytes());
        }
    }
    let edges = image.edges();
    hasher.update((edges.len() as u64).to_le_bytes());
    for (i, j) in edges {
        hasher.update((i as u64).to_le_bytes());
        hasher.update((j as u64).to_le_bytes());
    }
    format!("sha256:{}", hex::encode(hasher.finalize()))
}

/// One image referenced by a certificate, with its role in the command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageEntry {
    pub role: String,
    pub spec: ImageSpec,
    pub fingerprint: String,
}

/// The command's answer, tagged by shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultPayload {
    /// Decision outcome of an exhaustive search.
    Verdict {
        holds: bool,
        exhaustive: bool,
        nodes_explored: u64,
    },
    /// A single vertex, e.g. a found approximate fixed point.
    Vertex { point: Vec<i64> },
    /// A yes/no check outcome.
    Boolean { value: bool },
    /// A counted enumeration.
    Count { count: u64, nodes_explored: u64 },
}

/// One re-checked claim, recorded at emission time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub claim: String,
    pub ok: bool,
}

/// A point-pair table in the map-file convention.
pub type PairTable = Vec<(Vec<i64>, Vec<i64>)>;

/// The full certificate emitted on stdout (and to `--output`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub format: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub images: Vec<ImageEntry>,
    pub result: ResultPayload,
    /// The input map, echoed so the certificate stands alone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<PairTable>,
    /// A witness map produced by the command (e.g. a fixed-point-free map).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PairTable>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
    pub transcript: Vec<TranscriptEntry>,
}

impl Certificate {
    /// Starts a certificate for `command` with empty optional sections.
    pub fn new(command: &str) -> Self {
        Certificate {
            format: CERT_FORMAT.to_string(),
            command: command.to_string(),
            parameters: BTreeMap::new(),
            images: Vec::new(),
            result: ResultPayload::Boolean { value: true },
            map: None,
            witness: None,
            details: BTreeMap::new(),
            transcript: Vec::new(),
        }
    }

    /// Attaches an image under a role name, fingerprinting it.
    pub fn push_image(&mut self, role: &str, spec: &ImageSpec, image: &DigitalImage) {
        self.images.push(ImageEntry {
            role: role.to_string(),
            spec: spec.clone(),
            fingerprint: fingerprint(image),
        });
    }

    /// Records a parameter that influenced the run.
    pub fn set_param(&mut self, key: &str, value: serde_json::Value) {
        self.parameters.insert(key.to_string(), value);
    }

    /// Records an auxiliary fact about the result.
    pub fn set_detail(&mut self, key: &str, value: serde_json::Value) {
        self.details.insert(key.to_string(), value);
    }

    /// Appends a re-checked claim.
    pub fn check(&mut self, claim: &str, ok: bool) {
        self.transcript.push(TranscriptEntry {
            claim: claim.to_string(),
            ok,
        });
    }

    /// Renders the certificate as canonical JSON (pretty, trailing newline).
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("certificates are plain data");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Converts a map into the pair-table convention used inside certificates.
pub fn map_to_table(map: &DigitalMap) -> PairTable {
    map.pairs()
        .into_iter()
        .map(|(a, b)| (a.coords().to_vec(), b.coords().to_vec()))
        .collect()
}

/// One line of an independent re-verification.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyLine {
    pub check: String,
    pub ok: bool,
}

/// Outcome of re-verifying a certificate from its own payload.
#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub format: String,
    pub valid: bool,
    pub checks: Vec<VerifyLine>,
}

impl VerifyReport {
    fn push(&mut self, check: impl Into<String>, ok: bool) {
        if !ok {
            self.valid = false;
        }
        self.checks.push(VerifyLine {
            check: check.into(),
            ok,
        });
    }

    /// Renders the report as JSON (same conventions as certificates).
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports are plain data");
        text.push('\n');
        text
    }
}

fn table_to_pairs(table: &PairTable) -> Vec<(Point, Point)> {
    table
        .iter()
        .map(|(a, b)| (Point::new(a.clone()), Point::new(b.clone())))
        .collect()
}

fn build_self_map(image: &DigitalImage, table: &PairTable) -> Option<DigitalMap> {
    if table.iter().any(|(a, b)| a.is_empty() || b.is_empty()) {
        return None;
    }
    DigitalMap::from_pairs(image.clone(), image.clone(), &table_to_pairs(table)).ok()
}

/// Re-checks every claim a certificate makes, from the payload alone.
///
/// Witness maps are rebuilt and tested for continuity and for the emptiness
/// or membership claims the result rests on; boolean results are recomputed
/// outright.  Exhaustiveness flags and enumeration counts describe a search
/// that is deliberately *not* re-run, and the report says so.
pub fn verify_certificate(cert: &Certificate) -> VerifyReport {
    let mut report = VerifyReport {
        format: "afpp-verify/1".to_string(),
        valid: true,
        checks: Vec::new(),
    };

    report.push("certificate format is recognized", cert.format == CERT_FORMAT);

    let mut images: Vec<(String, DigitalImage)> = Vec::new();
    for entry in &cert.images {
        match entry.spec.to_image() {
            Ok(image) => {
                report.push(
                    format!("image '{}' spec elaborates", entry.role),
                    true,
                );
                report.push(
                    format!("image '{}' fingerprint matches its spec", entry.role),
                    fingerprint(&image) == entry.fingerprint,
                );
                images.push((entry.role.clone(), image));
            }
            Err(err) => {
                report.push(
                    format!("image '{}' spec elaborates ({err})", entry.role),
                    false,
                );
            }
        }
    }
    if images.len() != cert.images.len() {
        return report;
    }

    let image_by_role = |role: &str| images.iter().find(|(r, _)| r == role).map(|(_, i)| i);
    let primary = images.first().map(|(_, i)| i);

    report.push(
        "recorded transcript reports every claim as checked",
        cert.transcript.iter().all(|entry| entry.ok),
    );

    match &cert.result {
        ResultPayload::Verdict {
            holds,
            exhaustive,
            nodes_explored: _,
        } => {
            let Some(image) = primary else {
                report.push("verdict certificate names an image", false);
                return report;
            };
            if *holds {
                report.push(
                    "holds verdict is flagged exhaustive (search itself not re-run)",
                    *exhaustive,
                );
                report.push("holds verdict carries no witness", cert.witness.is_none());
            } else {
                match cert.witness.as_ref().and_then(|t| build_self_map(image, t)) {
                    Some(witness) => {
                        report.push("witness is a well-formed self-map", true);
                        report.push("witness is continuous", witness.is_continuous());
                        let afps = maps::approximate_fixed_points(&witness)
                            .expect("self-map by construction");
                        report.push("witness has no approximate fixed point", afps.is_empty());
                    }
                    None => report.push("witness is a well-formed self-map", false),
                }
            }
        }
        ResultPayload::Vertex { point } => {
            let Some(image) = primary else {
                report.push("vertex certificate names an image", false);
                return report;
            };
            match cert.map.as_ref().and_then(|t| build_self_map(image, t)) {
                Some(map) => {
                    report.push("input map is a well-formed self-map", true);
                    report.push("input map is continuous", map.is_continuous());
                    let point = Point::new(point.clone());
                    let is_afp = image.contains(&point)
                        && image.adjacent_or_equal(&point, map.apply(&point).unwrap_or(&point));
                    report.push(
                        "returned vertex is within one step of its image",
                        is_afp,
                    );
                }
                None => report.push("input map is a well-formed self-map", false),
            }
        }
        ResultPayload::Boolean { value } => {
            verify_boolean(cert, &mut report, &image_by_role, *value);
        }
        ResultPayload::Count { .. } => {
            report.push(
                "count records an enumeration (structural check only, search not re-run)",
                true,
            );
        }
    }

    report
}

fn verify_boolean<'a>(
    cert: &Certificate,
    report: &mut VerifyReport,
    image_by_role: &impl Fn(&str) -> Option<&'a DigitalImage>,
    value: bool,
) {
    match cert.command.as_str() {
        "check" => {
            let what = cert
                .parameters
                .get("what")
                .and_then(|v| v.as_str())
                .unwrap_or("");
            let (Some(domain), Some(codomain)) =
                (image_by_role("domain"), image_by_role("codomain"))
            else {
                report.push("check certificate names domain and codomain", false);
                return;
            };
            let map = cert.map.as_ref().and_then(|t| {
                DigitalMap::from_pairs(domain.clone(), codomain.clone(), &table_to_pairs(t)).ok()
            });
            let Some(map) = map else {
                report.push("input map is well-formed", false);
                return;
            };
            report.push("input map is well-formed", true);
            let recomputed = match what {
                "continuity" => Some(map.is_continuous()),
                "retraction" => Some(maps::is_retraction(&map).unwrap_or(false)),
                _ => None,
            };
            match recomputed {
                Some(answer) => report.push(
                    format!("recomputed {what} answer matches the certificate"),
                    answer == value,
                ),
                None => report.push("check certificate names a known predicate", false),
            }
        }
        "np-check" => {
            let form = cert
                .parameters
                .get("form")
                .and_then(|v| v.as_str())
                .unwrap_or("");
            match form {
                "equals" => {
                    let (Some(left), Some(right)) =
                        (image_by_role("left"), image_by_role("right"))
                    else {
                        report.push("np-check certificate names both factors", false);
                        return;
                    };
                    match np_equals_cu(left, right) {
                        Ok(cmp) => report.push(
                            "recomputed product comparison matches the certificate",
                            cmp.equal == value,
                        ),
                        Err(_) => report.push("product comparison recomputes", false),
                    }
                }
                "assoc" => {
                    let Some(image) = image_by_role("base") else {
                        report.push("np-check certificate names a base image", false);
                        return;
                    };
                    let cube_dim = cert
                        .parameters
                        .get("cube_dim")
                        .and_then(|v| v.as_u64())
                        .unwrap_or(0) as usize;
                    let side = cert
                        .parameters
                        .get("side")
                        .and_then(|v| v.as_i64())
                        .unwrap_or(-1);
                    match np_assoc_check(image, cube_dim, side) {
                        Ok(ok) => report.push(
                            "recomputed re-association check matches the certificate",
                            ok == value,
                        ),
                        Err(_) => report.push("re-association check recomputes", false),
                    }
                }
                _ => report.push("np-check certificate names a known form", false),
            }
        }
        other => {
            report.push(
                format!("boolean result of '{other}' has no independent recomputation"),
                true,
            );
        }
    }
}
