//! Error models and the modified (weighted) system `F ⊗ M`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{ActionKind, WeightedAutomaton, Weight};

/// Largest cost accepted in an error model.
pub const MAX_COST: u64 = (1 << 31) - 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEntry {
    pub from: String,
    pub to: String,
    pub cost: i64,
}

/// JSON form of an error model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawErrorModel {
    pub kind: ActionKind,
    #[serde(default)]
    pub entries: Vec<RawEntry>,
}

impl RawErrorModel {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ErrorModelError {
    #[error("entry ({from}, {to}) has negative cost {cost}")]
    NegativeCost { from: String, to: String, cost: i64 },
    #[error("entry ({from}, {to}) has cost {cost}, above the limit {MAX_COST}")]
    CostTooLarge { from: String, to: String, cost: i64 },
    #[error("diagonal entry ({action}, {action}) must be 0, found {cost}")]
    NonzeroDiagonal { action: String, cost: i64 },
    #[error("entry ({from}, {to}) is given more than once")]
    DuplicateEntry { from: String, to: String },
    #[error("triangle inequality fails for ({a}, {b}, {c}): M({a},{b}) + M({b},{c}) < M({a},{c})")]
    TriangleViolation { a: String, b: String, c: String },
    #[error("expected an {expected} error model, found {found}")]
    KindMismatch { expected: ActionKind, found: ActionKind },
    #[error("error model of kind {kind} names `{action}`, which the automaton declares as {actual}")]
    ActionKindMismatch { action: String, kind: ActionKind, actual: ActionKind },
    #[error("cheat target `{action}` is not a declared {kind} action of `{automaton}`")]
    UnknownCheatTarget { action: String, kind: ActionKind, automaton: String },
    #[error("entry ({from}, {to}) uses an action known to the composition partner")]
    RestrictionViolation { from: String, to: String },
}

/// A partial cost matrix over actions of one kind. The diagonal is
/// implicitly zero; absent off-diagonal pairs are forbidden substitutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorModel {
    kind: ActionKind,
    costs: BTreeMap<(String, String), u64>,
    domain: BTreeSet<String>,
}

impl ErrorModel {
    pub fn identity(kind: ActionKind) -> Self {
        ErrorModel { kind, costs: BTreeMap::new(), domain: BTreeSet::new() }
    }

    /// Every action in `actions` may replace every other one at `cost`.
    pub fn uniform<I, S>(kind: ActionKind, actions: I, cost: u64) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let domain: BTreeSet<String> = actions.into_iter().map(Into::into).collect();
        let mut costs = BTreeMap::new();
        for a in &domain {
            for b in &domain {
                if a != b {
                    costs.insert((a.clone(), b.clone()), cost);
                }
            }
        }
        ErrorModel { kind, costs, domain }
    }

    /// Builds and validates a model from `(from, to, cost)` entries.
    pub fn from_entries<'a>(
        kind: ActionKind,
        entries: impl IntoIterator<Item = (&'a str, &'a str, u64)>,
    ) -> Result<Self, Vec<ErrorModelError>> {
        let raw = RawErrorModel {
            kind,
            entries: entries
                .into_iter()
                .map(|(from, to, cost)| RawEntry {
                    from: from.to_string(),
                    to: to.to_string(),
                    cost: cost as i64,
                })
                .collect(),
        };
        validate_error_model(&raw, kind)
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn domain(&self) -> &BTreeSet<String> {
        &self.domain
    }

    pub fn is_identity(&self) -> bool {
        self.costs.is_empty()
    }

    /// Cost of playing `to` in place of `from`; `None` stands for ⊥.
    pub fn cost(&self, from: &str, to: &str) -> Option<u64> {
        if from == to {
            Some(0)
        } else {
            self.costs.get(&(from.to_string(), to.to_string())).copied()
        }
    }

    /// Off-diagonal entries with finite cost.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.costs.iter().map(|((a, b), c)| (a.as_str(), b.as_str(), *c))
    }

    pub fn max_cost(&self) -> u64 {
        self.costs.values().copied().max().unwrap_or(0)
    }

    /// Substitutes usable instead of `from`, including `from` itself.
    fn substitutes<'a>(&'a self, from: &'a str) -> impl Iterator<Item = (&'a str, u64)> + 'a {
        std::iter::once((from, 0)).chain(
            self.costs
                .iter()
                .filter(move |((a, _), _)| a == from)
                .map(|((_, b), c)| (b.as_str(), *c)),
        )
    }

    pub fn to_raw(&self) -> RawErrorModel {
        RawErrorModel {
            kind: self.kind,
            entries: self
                .entries()
                .map(|(from, to, cost)| RawEntry { from: from.into(), to: to.into(), cost: cost as i64 })
                .collect(),
        }
    }
}

/// Validates parsed entries for a model of kind `expected`.
pub fn validate_error_model(
    raw: &RawErrorModel,
    expected: ActionKind,
) -> Result<ErrorModel, Vec<ErrorModelError>> {
    let mut errors = Vec::new();
    if raw.kind != expected {
        errors.push(ErrorModelError::KindMismatch { expected, found: raw.kind });
    }

    let mut costs = BTreeMap::new();
    let mut domain = BTreeSet::new();
    for e in &raw.entries {
        domain.insert(e.from.clone());
        domain.insert(e.to.clone());
        if e.cost < 0 {
            errors.push(ErrorModelError::NegativeCost { from: e.from.clone(), to: e.to.clone(), cost: e.cost });
            continue;
        }
        if e.cost as u64 > MAX_COST {
            errors.push(ErrorModelError::CostTooLarge { from: e.from.clone(), to: e.to.clone(), cost: e.cost });
            continue;
        }
        if e.from == e.to {
            if e.cost != 0 {
                errors.push(ErrorModelError::NonzeroDiagonal { action: e.from.clone(), cost: e.cost });
            }
            continue;
        }
        if costs.insert((e.from.clone(), e.to.clone()), e.cost as u64).is_some() {
            errors.push(ErrorModelError::DuplicateEntry { from: e.from.clone(), to: e.to.clone() });
        }
    }

    let model = ErrorModel { kind: raw.kind, costs, domain };
    errors.extend(triangle_violations(&model));
    if errors.is_empty() {
        Ok(model)
    } else {
        Err(errors)
    }
}

fn triangle_violations(model: &ErrorModel) -> Vec<ErrorModelError> {
    let mut errors = Vec::new();
    for a in &model.domain {
        for b in &model.domain {
            let Some(ab) = model.cost(a, b) else { continue };
            if a == b {
                continue;
            }
            for c in &model.domain {
                if b == c || a == c {
                    continue;
                }
                let Some(bc) = model.cost(b, c) else { continue };
                let ok = matches!(model.cost(a, c), Some(ac) if ab + bc >= ac);
                if !ok {
                    errors.push(ErrorModelError::TriangleViolation {
                        a: a.clone(),
                        b: b.clone(),
                        c: c.clone(),
                    });
                }
            }
        }
    }
    errors
}

/// Penalty on the `s_err` selfloop: the largest finite cost of either
/// model, or 1 when neither model has a positive entry.
pub fn max_finite_weight(input_model: &ErrorModel, output_model: &ErrorModel) -> u64 {
    match input_model.max_cost().max(output_model.max_cost()) {
        0 => 1,
        w => w,
    }
}

/// Builds `F ⊗ M`. Actions not of `M`'s kind keep their transitions
/// unchanged. For a weighted `F` the cost of a cheat is added to the weight
/// of the transition it replaces.
pub fn apply_error_model(
    automaton: &WeightedAutomaton,
    model: &ErrorModel,
) -> Result<WeightedAutomaton, ErrorModelError> {
    let kind = model.kind();
    for (from, to, _) in model.entries() {
        for action in [from, to] {
            if let Some(actual) = automaton.kind_of(action) {
                if actual != kind {
                    return Err(ErrorModelError::ActionKindMismatch {
                        action: action.to_string(),
                        kind,
                        actual,
                    });
                }
            }
        }
        if !automaton.alphabet(kind).contains(to) {
            return Err(ErrorModelError::UnknownCheatTarget {
                action: to.to_string(),
                kind,
                automaton: automaton.name().to_string(),
            });
        }
    }

    let alphabet = automaton.alphabet(kind);
    let mut edges: BTreeMap<(usize, String, usize), Weight> = BTreeMap::new();
    for t in automaton.transitions() {
        let key = (t.from, t.action.clone(), t.to);
        edges.entry(key).and_modify(|w| *w = (*w).min(t.weight)).or_insert(t.weight);
        if !alphabet.contains(&t.action) {
            continue;
        }
        for (target, cost) in model.substitutes(&t.action) {
            let w = t.weight + cost;
            edges
                .entry((t.from, target.to_string(), t.to))
                .and_modify(|old| *old = (*old).min(w))
                .or_insert(w);
        }
    }

    let result = WeightedAutomaton::new(
        automaton.name().to_string(),
        automaton.states().iter().cloned(),
        automaton.state_name(automaton.initial()),
        automaton.inputs().iter().cloned(),
        automaton.outputs().iter().cloned(),
        edges.into_iter().map(|((from, action, to), w)| {
            (
                automaton.state_name(from).to_string(),
                action,
                automaton.state_name(to).to_string(),
                w,
            )
        }),
    )
    .expect("modified system keeps the original signature");
    Ok(result)
}

/// The set of cheat targets an error model may use so that `F ⊗ M` stays
/// composable with a partner `G` and keeps `F`'s alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionSafety {
    pub allowed_cheat_targets: BTreeSet<String>,
}

impl CompositionSafety {
    /// Allowed targets for a model of `kind` applied to `component` before
    /// composing with `partner`: the component's actions of that kind that
    /// the partner does not know at all.
    ///
    /// For outputs this is stricter than excluding only the partner's
    /// outputs. A cheat that emits an output the partner listens to fires
    /// without the partner moving in `(F ∥ G) ⊗ M`, and can make `F ⊗ M`
    /// incompatible with `G`. [`check`](Self::check) applies the same set
    /// to the replaced action, since replacing a joint step by a private
    /// one desynchronizes the partner just the same.
    pub fn for_partner(
        component: &WeightedAutomaton,
        partner: &WeightedAutomaton,
        kind: ActionKind,
    ) -> Self {
        let allowed = component
            .alphabet(kind)
            .iter()
            .filter(|a| partner.kind_of(a).is_none())
            .cloned()
            .collect();
        CompositionSafety { allowed_cheat_targets: allowed }
    }

    pub fn check(&self, model: &ErrorModel) -> Result<(), ErrorModelError> {
        for (from, to, _) in model.entries() {
            if !self.allowed_cheat_targets.contains(from) || !self.allowed_cheat_targets.contains(to) {
                return Err(ErrorModelError::RestrictionViolation { from: from.into(), to: to.into() });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Bia;

    #[test]
    fn empty_model_is_identity() {
        let m = ErrorModel::from_entries(ActionKind::Output, []).unwrap();
        assert!(m.is_identity());
        assert_eq!(m.cost("x", "x"), Some(0));
        assert_eq!(m.cost("x", "y"), None);
    }

    #[test]
    fn missing_direct_entry_violates_triangle() {
        let errors =
            ErrorModel::from_entries(ActionKind::Input, [("a", "b", 1), ("b", "c", 1)]).unwrap_err();
        assert_eq!(
            errors,
            vec![ErrorModelError::TriangleViolation { a: "a".into(), b: "b".into(), c: "c".into() }]
        );
    }

    #[test]
    fn too_expensive_direct_entry_violates_triangle() {
        let errors = ErrorModel::from_entries(
            ActionKind::Input,
            [("a", "b", 1), ("b", "c", 1), ("a", "c", 3)],
        )
        .unwrap_err();
        assert_eq!(errors.len(), 1);
    }

    #[test]
    fn abort_for_fail_model_is_valid() {
        let m = ErrorModel::from_entries(ActionKind::Output, [("abort", "fail", 1)]).unwrap();
        assert_eq!(m.cost("abort", "fail"), Some(1));
        assert_eq!(m.cost("fail", "abort"), None);
    }

    #[test]
    fn raw_errors_are_all_reported() {
        let raw = RawErrorModel::from_json(
            r#"{"kind":"input","entries":[{"from":"a","to":"b","cost":-1},{"from":"c","to":"c","cost":2}]}"#,
        )
        .unwrap();
        let errors = validate_error_model(&raw, ActionKind::Output).unwrap_err();
        assert!(errors.contains(&ErrorModelError::KindMismatch {
            expected: ActionKind::Output,
            found: ActionKind::Input
        }));
        assert!(errors.iter().any(|e| matches!(e, ErrorModelError::NegativeCost { cost: -1, .. })));
        assert!(errors.iter().any(|e| matches!(e, ErrorModelError::NonzeroDiagonal { cost: 2, .. })));
    }

    #[test]
    fn explicit_zero_diagonal_is_accepted() {
        let raw = RawErrorModel::from_json(r#"{"kind":"output","entries":[{"from":"x","to":"x","cost":0}]}"#)
            .unwrap();
        assert!(validate_error_model(&raw, ActionKind::Output).unwrap().is_identity());
    }

    #[test]
    fn max_finite_weight_cases() {
        let id_i = ErrorModel::identity(ActionKind::Input);
        let id_o = ErrorModel::identity(ActionKind::Output);
        assert_eq!(max_finite_weight(&id_i, &id_o), 1);

        let mo = ErrorModel::from_entries(ActionKind::Output, [("abort", "fail", 1)]).unwrap();
        assert_eq!(max_finite_weight(&id_i, &mo), 1);

        let mo = ErrorModel::from_entries(ActionKind::Output, [("x", "y", 1), ("y", "x", 3)]).unwrap();
        let mi = ErrorModel::from_entries(ActionKind::Input, [("a", "b", 2)]).unwrap();
        assert_eq!(max_finite_weight(&mi, &mo), 3);
    }

    #[test]
    fn identity_model_keeps_automaton() {
        let f = Bia::build("F", &["s", "t"], "s", &["a"], &["u"], &[("s", "a", "t"), ("t", "u", "s")]).unwrap();
        let g = apply_error_model(&f, &ErrorModel::identity(ActionKind::Output)).unwrap();
        assert_eq!(&g, f.as_weighted());
    }

    #[test]
    fn cheat_weight_is_minimum_over_replaced_actions() {
        let f = Bia::build(
            "F",
            &["s", "t"],
            "s",
            &[],
            &["u", "v", "w"],
            &[("s", "u", "t"), ("s", "v", "t")],
        )
        .unwrap();
        let m = ErrorModel::from_entries(ActionKind::Output, [("u", "w", 2), ("v", "w", 1)]).unwrap();
        let g = apply_error_model(&f, &m).unwrap();
        let s = g.state_id("s").unwrap();
        let ws: Vec<_> = g.successors(s, "w").map(|t| t.weight).collect();
        assert_eq!(ws, vec![1]);
        assert_eq!(g.successors(s, "u").next().unwrap().weight, 0);
    }

    #[test]
    fn unknown_cheat_target_is_rejected() {
        let f = Bia::build("F", &["s"], "s", &[], &["u"], &[("s", "u", "s")]).unwrap();
        let m = ErrorModel::from_entries(ActionKind::Output, [("u", "zz", 1)]).unwrap();
        assert!(matches!(
            apply_error_model(&f, &m),
            Err(ErrorModelError::UnknownCheatTarget { .. })
        ));
    }

    #[test]
    fn wrong_kind_action_is_rejected() {
        let f = Bia::build("F", &["s"], "s", &["a"], &["u"], &[("s", "u", "s")]).unwrap();
        let m = ErrorModel::from_entries(ActionKind::Output, [("u", "a", 1)]).unwrap();
        assert!(matches!(
            apply_error_model(&f, &m),
            Err(ErrorModelError::ActionKindMismatch { .. })
        ));
    }

    #[test]
    fn composition_safety_targets() {
        let f = Bia::build("F", &["s"], "s", &["a", "b"], &["x", "y"], &[]).unwrap();
        let g = Bia::build("G", &["s"], "s", &["x"], &["a", "z"], &[]).unwrap();
        let out = CompositionSafety::for_partner(&f, &g, ActionKind::Output);
        assert_eq!(out.allowed_cheat_targets, BTreeSet::from(["y".to_string()]));
        let inp = CompositionSafety::for_partner(&f, &g, ActionKind::Input);
        assert_eq!(inp.allowed_cheat_targets, BTreeSet::from(["b".to_string()]));
        let bad = ErrorModel::from_entries(ActionKind::Input, [("b", "a", 1)]).unwrap();
        assert!(inp.check(&bad).is_err());
        let shared_source = ErrorModel::from_entries(ActionKind::Output, [("x", "y", 1)]).unwrap();
        assert!(out.check(&shared_source).is_err());
        let private = ErrorModel::from_entries(ActionKind::Output, [("y", "y", 0)]).unwrap();
        assert!(out.check(&private).is_ok());
    }
}
