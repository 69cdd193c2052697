use super::*;
use crate::report::{Check, Classification, Dims, HolDims, Tolerances, VerificationReport};
use crate::submanifold::{
    check_curvature_invariance, check_eschenburg, check_fetth3, check_fundamental, check_graded_rules, check_h_odd,
    check_nondegenerate, check_one_full, check_parallel1, check_semiparallel, check_shape_adjoint,
    check_totally_geodesic, JetKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Tolerances and seed for one classification run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunSettings {
    pub tolerances: Tolerances,
    pub seed: u64,
}

const SAMPLES: usize = 50;
const TRANSPORT_PATHS: usize = 20;
const EXPM_SAMPLES: usize = 3;

struct Sink<'a> {
    checks: &'a mut BTreeMap<String, Check>,
    diagnostics: &'a mut BTreeMap<String, f64>,
}

impl Sink<'_> {
    fn at_most(&mut self, name: &str, residual: f64, threshold: f64) {
        self.checks.insert(name.into(), Check::at_most(residual, threshold));
    }

    fn flag(&mut self, name: &str, pass: bool, residual: f64) {
        self.checks.insert(name.into(), Check { pass, residual });
    }

    fn info(&mut self, name: &str, value: f64) {
        self.diagnostics.insert(name.into(), value);
    }
}

/// Runs every applicable check on `jet` and compares the extrinsic
/// holonomy with the expectation for its construction. Computation
/// failures are recorded in the report rather than returned.
pub fn classify(jet: &TwoJet, settings: &RunSettings) -> VerificationReport {
    let model = jet.model();
    let mut report = VerificationReport {
        model: model.name().to_string(),
        jet: jet.kind().label().to_string(),
        epsilon: model.epsilon(),
        c: jet.c(),
        dims: Dims {
            g: model.dim_g(),
            k: model.dim_k(),
            p: model.dim_p(),
            tangent: jet.tangent().dim(),
            normal: jet.normal().dim(),
            first_normal: jet.first_normal().dim(),
            osculating: jet.second_osculating().dim(),
        },
        hol: HolDims::default(),
        hermitian: model.is_hermitian(),
        checks: BTreeMap::new(),
        classification: Classification::default(),
        diagnostics: BTreeMap::new(),
        tolerances: settings.tolerances,
        seed: settings.seed,
        error: None,
    };
    let mut sink = Sink { checks: &mut report.checks, diagnostics: &mut report.diagnostics };
    match run(jet, settings, &mut sink) {
        Ok((hol, classification)) => {
            report.hol = hol;
            report.classification = classification;
        }
        Err(e) => {
            report.classification.case = "error".into();
            report.error = Some(e.to_string());
        }
    }
    report
}

fn run(jet: &TwoJet, settings: &RunSettings, s: &mut Sink) -> Result<(HolDims, Classification)> {
    let th = settings.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let model = jet.model();
    let family = jet.kind() == JetKind::Family;
    let zero_family = family && jet.c() == 0.0;

    s.at_most("h_odd", check_h_odd(jet), th.exact());
    s.at_most("shape_adjoint", check_shape_adjoint(jet, &mut rng, SAMPLES), th.exact());
    s.at_most("graded_rules", check_graded_rules(jet, &mut rng, SAMPLES), th.exact());
    s.at_most("semiparallel", check_semiparallel(jet)?, th.identity());
    s.at_most("curvature_invariance_tangent", check_curvature_invariance(model, jet.tangent())?, th.tight());
    s.at_most("curvature_invariance_first_normal", check_curvature_invariance(model, &jet.first_normal())?, th.tight());
    let f = check_fundamental(jet)?;
    s.at_most("fundamental_identity", f.identity, th.identity());
    s.at_most("fundamental_preserves_osculating", f.preserves_osculating, th.identity());
    s.at_most("fundamental_even", f.even_on_osculating, th.identity());
    s.at_most("fetth3", check_fetth3(jet, &mut rng, SAMPLES)?, th.identity());
    s.at_most("parallel1", check_parallel1(jet)?, th.identity());

    let hol = extrinsic_hol(jet)?;
    let cert = hol.certificates;
    s.flag("hol_direct_sum", cert.dim_defect == 0 && cert.graded <= th.identity(), cert.graded);
    s.at_most("hol_closure", cert.closure, th.identity());
    s.at_most("hol_stability", cert.stability, th.identity());
    s.at_most("hol_sigma_invariance", cert.sigma, th.identity());
    s.at_most("hol_in_osculating", cert.outside_osculating, th.identity());
    if !model.is_flat() {
        let gap = (hol.ambient.dim() as f64 - model.dim_k() as f64).abs();
        s.flag("hol_ambient_dim_k", gap == 0.0, gap);
    }

    s.at_most("transport_expm_single", mu_single_residual(jet, &mut rng, th.ode_step, EXPM_SAMPLES)?, th.identity());
    s.at_most("transport_expm_pair", mu_pair_residual(jet, &mut rng, th.ode_step, EXPM_SAMPLES)?, th.transport());
    let t = transport_stability(jet, &hol, &mut rng, TRANSPORT_PATHS, th.ode_step)?;
    s.at_most("transport_ad_stability", t.ad_stability, th.transport());
    s.at_most("transport_curvature", t.curvature, th.transport());
    s.at_most("transport_orthogonality", t.orthogonality, th.transport());
    s.at_most("transport_preserves_osculating", t.preserves_osculating, th.transport());

    let (one_full, one_full_res) = check_one_full(jet)?;
    let (nondeg, smin) = check_nondegenerate(jet)?;
    match jet.kind() {
        JetKind::Family | JetKind::Orbit | JetKind::Veronese if !zero_family => {
            s.flag("one_full", one_full, one_full_res);
            s.flag("nondegenerate", nondeg, smin);
        }
        _ => {
            s.info("one_full", one_full as u8 as f64);
            s.info("nondegenerate", nondeg as u8 as f64);
        }
    }
    if (family && !zero_family) || jet.kind() == JetKind::Orbit {
        let (ok, r) = check_eschenburg(jet)?;
        s.flag("eschenburg", ok, r);
    }
    if zero_family {
        s.at_most("totally_geodesic", check_totally_geodesic(jet), th.exact());
    }

    let mut commutator = None;
    if family && !zero_family {
        let ideal = commutator_of(&hol.ambient, jet.dim_p())?;
        s.at_most("hol_contains_commutator", hol.extrinsic.containment_residual(&ideal)?, th.identity());
        let even = hol.ambient.intersection(&GradedSplit::new(jet.tangent()).so_plus())?;
        let (same, r) = hol.plus.equal(&even)?;
        s.flag("hol_plus_is_ambient_even", same && r <= th.identity(), r);
        let image = jet.h_image();
        let (_, r) = image.equal(&hol.minus)?;
        s.info("h_image_dim", image.dim() as f64);
        s.info("h_image_vs_hol_minus", r);
        let cd = centralizer_diagnostic(jet, &hol)?;
        s.info("centralizer_dim", cd.dim as f64);
        s.flag("centralizer_implication", cd.implication_holds, if cd.implication_holds { 0.0 } else { 1.0 });
        commutator = Some(ideal);
    }

    let mut lagrangian = false;
    if let Some((_, j)) = model.hermitian_structure()? {
        let lag = lagrangian_residual(jet, &j);
        lagrangian = lag <= th.tight();
        if family && !zero_family {
            s.at_most("lagrangian", lag, th.tight());
        } else {
            s.info("lagrangian", lag);
        }
        if lagrangian && !zero_family {
            s.at_most("j_orthogonality", j_orthogonality(&hol.extrinsic, &j), th.tight());
            let (x, r) = solve_h_equals_j(jet, &j)?;
            s.at_most("j_least_squares", r, th.identity());
            s.info("j_solution_norm", x.norm());
        }
    }

    let dims = HolDims {
        ambient: hol.ambient.dim(),
        plus: hol.plus.dim(),
        minus: hol.minus.dim(),
        extrinsic: hol.extrinsic.dim(),
        codim: hol.codim,
    };
    let mut cl = Classification {
        computed_extrinsic_dim: dims.extrinsic,
        computed_codim: dims.codim,
        pass: true,
        ..Default::default()
    };
    match jet.kind() {
        JetKind::Family if zero_family => {
            cl.case = "totally_geodesic".into();
            cl.note = format!("tangent curvature only, plus={}", dims.plus);
        }
        JetKind::Family if model.is_hermitian() && lagrangian => {
            cl.case = "hermitian_lagrangian".into();
            cl.expected_codim = Some(1);
            let ideal = commutator.take().expect("family jets compute the commutator ideal");
            let (same, r) = hol.extrinsic.equal(&ideal)?;
            s.flag("hol_equals_commutator", same && r <= th.identity(), r);
            cl.pass = dims.codim == 1;
            cl.note = format!("codim {} (expected 1)", dims.codim);
        }
        JetKind::Family | JetKind::Orbit => {
            cl.case = if jet.kind() == JetKind::Orbit { "flat_orbit" } else { "generic" }.into();
            cl.expected_codim = Some(0);
            cl.pass = dims.codim == 0;
            cl.note = format!("codim {} (expected 0)", dims.codim);
        }
        JetKind::Veronese => {
            cl.case = "exceptional_sphere4".into();
            cl.accepted_extrinsic_dims = vec![4, 6];
            cl.pass = cl.accepted_extrinsic_dims.contains(&dims.extrinsic);
            cl.note = match dims.extrinsic {
                6 => "extrinsic dim 6: equals hol(N)".into(),
                4 => "extrinsic dim 4: exceptional branch".into(),
                n => format!("extrinsic dim {n} not in {{4, 6}}"),
            };
        }
        JetKind::Custom => {
            cl.case = "user_supplied".into();
            cl.note = format!("codim {}, no expectation", dims.codim);
            if model.is_hermitian() && lagrangian {
                cl.note.push_str("; hermitian and lagrangian, codim 1 would match the family case");
            }
        }
    }
    s.flag("classification", cl.pass, if cl.pass { 0.0 } else { 1.0 });
    Ok((dims, cl))
}
