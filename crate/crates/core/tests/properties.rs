//! Randomized properties tying the pieces together: probability
//! accounting, monotonicity of the payoff in equity, agreement between
//! the simplex and vertex-enumeration routes, and the orderings the
//! liquidation variants must respect.

use loanliq::{
    enumerate_scenarios, enumerate_vertices, grid_oracle, limited_liability_payoff,
    portfolio_realization, solve_invest, solve_liquidation, solve_lp, Error, InvestParams,
    InvestProblem, InvestmentDecision, LinearProgram, LiquidationProblem, LoanClass, LoanUniverse,
    LpStatus,
};
use proptest::prelude::*;

fn arb_universe() -> impl Strategy<Value = LoanUniverse> {
    (1usize..=3).prop_flat_map(|n_risky| {
        (
            0.0f64..0.04,
            proptest::collection::vec(0.005f64..0.08, n_risky),
            proptest::collection::vec(0.02f64..0.2, n_risky),
            proptest::collection::vec(0.01f64..0.35, n_risky),
            proptest::collection::vec(0.05f64..0.9, n_risky),
        )
            .prop_map(|(r0, rate_steps, haircut_steps, pds, lgds)| {
                let mut loans = vec![LoanClass {
                    id: 0,
                    rate: r0,
                    pd: 0.0,
                    lgd: 0.0,
                    haircut: 0.0,
                }];
                let mut rate = r0;
                let mut haircut = 0.0;
                for (i, ((rs, hs), (pd, lgd))) in rate_steps
                    .iter()
                    .zip(&haircut_steps)
                    .zip(pds.iter().zip(&lgds))
                    .enumerate()
                {
                    rate += rs;
                    haircut += hs;
                    loans.push(LoanClass {
                        id: i + 1,
                        rate,
                        pd: *pd,
                        lgd: *lgd,
                        haircut,
                    });
                }
                LoanUniverse::new(loans).expect("generated universes are valid")
            })
    })
}

fn arb_weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01f64..1.0, n).prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        raw.iter().map(|r| r / sum).collect()
    })
}

fn arb_portfolio() -> impl Strategy<Value = (LoanUniverse, InvestmentDecision)> {
    arb_universe().prop_flat_map(|u| {
        let n = u.len();
        (arb_weights(n), 0.02f64..0.2)
            .prop_map(move |(w, e)| (u.clone(), InvestmentDecision::new(w, e).unwrap()))
    })
}

fn arb_invest_problem() -> impl Strategy<Value = InvestProblem> {
    (
        arb_universe(),
        1.0f64..1.3,
        0.01f64..0.08,
        0.0005f64..0.02,
        proptest::option::of(0.02f64..0.5),
    )
        .prop_flat_map(|(u, delta, k_lev, theta1, haircut_cap)| {
            let n = u.len();
            proptest::collection::vec(0.0f64..0.1, n - 1).prop_map(move |risky_charges| {
                let mut capital_charges = vec![0.0];
                capital_charges.extend_from_slice(&risky_charges);
                InvestProblem::new(
                    u.clone(),
                    InvestParams {
                        delta,
                        k_lev,
                        theta1,
                        haircut_cap,
                        capital_charges,
                    },
                )
                .expect("generated parameters are valid")
            })
        })
}

/// Largest cash target used against a portfolio, as a fraction of what
/// a full fire sale would raise.
fn max_raisable(u: &LoanUniverse, d: &InvestmentDecision) -> f64 {
    d.weights()
        .iter()
        .zip(u.loans())
        .map(|(x, l)| x * (1.0 - l.haircut) * (1.0 + l.rate / 2.0))
        .sum()
}

fn linear_objective(lp: &LinearProgram, point: &[f64]) -> f64 {
    lp.objective.iter().zip(point).map(|(c, x)| c * x).sum()
}

proptest! {
    #[test]
    fn scenario_probabilities_form_a_distribution(u in arb_universe()) {
        let set = enumerate_scenarios(&u).unwrap();
        let total: f64 = set.scenarios().iter().map(|s| s.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for s in set.scenarios() {
            prop_assert!((0.0..=1.0).contains(&s.probability));
            prop_assert!(s.unit_payoffs.iter().all(|v| *v > 0.0));
        }
    }

    #[test]
    fn shareholder_payoff_never_rises_with_equity(
        (u, d) in arb_portfolio(),
        extra in 0.001f64..0.5,
        delta in 1.0f64..1.5,
    ) {
        let set = enumerate_scenarios(&u).unwrap();
        let higher =
            InvestmentDecision::new(d.weights().to_vec(), (d.equity() + extra).min(1.0)).unwrap();
        let low = limited_liability_payoff(&d, &set, delta).unwrap();
        let high = limited_liability_payoff(&higher, &set, delta).unwrap();
        prop_assert!(high <= low + 1e-12, "payoff rose from {low} to {high}");
    }

    #[test]
    fn realization_is_linear_in_the_weights(
        (u, d1) in arb_portfolio(),
        raw in proptest::collection::vec(0.01f64..1.0, 4),
        mix in 0.0f64..1.0,
    ) {
        let n = u.len();
        let sum: f64 = raw[..n].iter().sum();
        let w2: Vec<f64> = raw[..n].iter().map(|r| r / sum).collect();
        let d2 = InvestmentDecision::new(w2, d1.equity()).unwrap();
        let blended: Vec<f64> = d1
            .weights()
            .iter()
            .zip(d2.weights())
            .map(|(a, b)| mix * a + (1.0 - mix) * b)
            .collect();
        let db = InvestmentDecision::new(blended, d1.equity()).unwrap();
        let set = enumerate_scenarios(&u).unwrap();
        for s in set.scenarios() {
            let xa = portfolio_realization(&d1, s).unwrap();
            let xb = portfolio_realization(&d2, s).unwrap();
            let xm = portfolio_realization(&db, s).unwrap();
            prop_assert!((xm - (mix * xa + (1.0 - mix) * xb)).abs() < 1e-12);
        }
    }

    #[test]
    fn liquidation_lp_routes_agree(
        (u, d) in arb_portfolio(),
        cash_frac in 0.0f64..0.95,
        floor_frac in proptest::option::of(0.0f64..0.9),
    ) {
        let required = cash_frac * max_raisable(&u, &d);
        let total_risk: f64 = d
            .weights()
            .iter()
            .zip(u.loans())
            .map(|(x, l)| x * l.pd * l.lgd)
            .sum();
        let floor = floor_frac.map(|f| f * total_risk);
        let problem = LiquidationProblem::new(d, u, required, floor).unwrap();
        let lp = problem.linear_program();
        let direct = solve_lp(&lp).unwrap();
        let vertices = enumerate_vertices(&lp).unwrap();
        match direct.status {
            LpStatus::Optimal => {
                prop_assert!(!vertices.is_empty());
                let best = vertices
                    .iter()
                    .map(|v| linear_objective(&lp, v))
                    .fold(f64::INFINITY, f64::min);
                prop_assert!(
                    (best - direct.objective_value).abs() < 1e-8,
                    "simplex found {}, vertices found {best}",
                    direct.objective_value
                );
            }
            LpStatus::Infeasible => prop_assert!(vertices.is_empty()),
            LpStatus::Unbounded => prop_assert!(false, "box-bounded program cannot be unbounded"),
        }
    }

    #[test]
    fn risk_floor_never_lowers_the_liquidation_loss(
        (u, d) in arb_portfolio(),
        cash_frac in 0.05f64..0.9,
        floor_frac in 0.0f64..1.2,
    ) {
        let required = cash_frac * max_raisable(&u, &d);
        let total_risk: f64 = d
            .weights()
            .iter()
            .zip(u.loans())
            .map(|(x, l)| x * l.pd * l.lgd)
            .sum();
        let floor = floor_frac * total_risk;
        let unconstrained =
            LiquidationProblem::new(d.clone(), u.clone(), required, None).unwrap();
        let plan4 = solve_liquidation(&unconstrained).unwrap();
        let constrained = LiquidationProblem::new(d, u, required, Some(floor)).unwrap();
        match solve_liquidation(&constrained) {
            Ok(plan3) => {
                prop_assert!(plan3.haircut_loss() >= plan4.haircut_loss() - 1e-9);
                let shed: f64 = plan3
                    .betas()
                    .iter()
                    .zip(constrained.universe().loans())
                    .map(|(b, l)| b * l.pd * l.lgd)
                    .sum();
                prop_assert!(shed >= floor - 1e-9);
            }
            Err(Error::RiskFloorUnattainable { max_achievable, .. }) => {
                prop_assert!(max_achievable < floor + 1e-9);
            }
            Err(other) => prop_assert!(false, "unexpected error {other:?}"),
        }
    }

    #[test]
    fn plans_raise_exactly_the_required_cash(
        (u, d) in arb_portfolio(),
        cash_frac in 0.0f64..0.95,
    ) {
        let required = cash_frac * max_raisable(&u, &d);
        let problem = LiquidationProblem::new(d, u, required, None).unwrap();
        let plan = solve_liquidation(&problem).unwrap();
        prop_assert!((plan.cash_raised() - required).abs() < 1e-9);
        let recomputed: f64 = plan
            .betas()
            .iter()
            .zip(problem.universe().loans())
            .map(|(b, l)| b * (1.0 - l.haircut) * (1.0 + l.rate / 2.0))
            .sum();
        prop_assert!((plan.cash_raised() - recomputed).abs() < 1e-12);
        for (b, x) in plan.betas().iter().zip(problem.investment().weights()) {
            prop_assert!(*b >= 0.0 && b <= x);
        }
    }

    #[test]
    fn liquidation_solves_are_deterministic(
        (u, d) in arb_portfolio(),
        cash_frac in 0.0f64..0.95,
    ) {
        let required = cash_frac * max_raisable(&u, &d);
        let problem = LiquidationProblem::new(d, u, required, None).unwrap();
        let first = solve_liquidation(&problem).unwrap();
        let second = solve_liquidation(&problem).unwrap();
        prop_assert_eq!(first.betas(), second.betas());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invest_solution_is_feasible_and_consistent(p in arb_invest_problem()) {
        // the all-safe portfolio at the leverage floor is always
        // feasible, so the solve must succeed
        let sol = solve_invest(&p).unwrap();
        let d = &sol.decision;
        prop_assert!(p.is_feasible(d.weights(), d.equity(), 1e-9));
        let recomputed = p.objective(d.weights(), d.equity()).unwrap();
        prop_assert!((recomputed - sol.objective_value).abs() < 1e-12);
        let again = solve_invest(&p).unwrap();
        prop_assert_eq!(d.weights(), again.decision.weights());
        prop_assert_eq!(d.equity(), again.decision.equity());
    }

    #[test]
    fn coarse_grid_never_beats_the_vertex_route(p in arb_invest_problem()) {
        let sol = solve_invest(&p).unwrap();
        let oracle = grid_oracle(&p, 0.1).unwrap();
        prop_assert!(
            sol.objective_value >= oracle.objective_value - 1e-12,
            "vertex route {} below grid {}",
            sol.objective_value,
            oracle.objective_value
        );
    }
}
