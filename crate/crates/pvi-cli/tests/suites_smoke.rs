use pvi_cli::checks::run_suite;

#[test]
fn quick_suites_all_pass() {
    for name in ["elliptic", "uniformization", "picard_fuchs", "dynamics", "forms", "symmetries"] {
        let report = run_suite(name, true).unwrap();
        for r in &report.records {
            println!(
                "{name}: {} residual {:.3e} threshold {:.1e} {}",
                r.name,
                r.residual,
                r.threshold,
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        assert!(report.overall_pass, "suite {name} failed");
    }
}
