use std::fs;

use stopwait_cli::{manifest_path_for, run_with, TIMESTAMP_KEY};
use stopwait_core::estimate::report::KvReport;
use stopwait_core::{utility, UtilitySpec};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str], stdin: &str) -> Run {
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("stopwait").chain(args.iter().copied());
    let code = run_with(argv, &mut input, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn ok(args: &[&str], stdin: &str) -> String {
    let r = run(args, stdin);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    r.stdout
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"], "").code, 0);
    assert_eq!(run(&["--version"], "").code, 0);
    assert_eq!(run(&["frobnicate"], "").code, 1);
    assert_eq!(run(&["threshold", "--discount", "lots"], "").code, 1);

    let bad = run(&["expand"], "event,question_id,time_hours\nposted,q1,zero\n");
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.starts_with("error:"), "{}", bad.stderr);
    assert_eq!(run(&["threshold", "--discount", "1.5"], "").code, 2);
    assert_eq!(run(&["fit-logit", "--input", "/nonexistent/obs.csv"], "").code, 2);
}

#[test]
fn manifest_goes_next_to_output_or_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let out_s = out.display().to_string();
    ok(&["threshold", "--step-det", "-1", "--grid", "-5:15:401", "--output", &out_s], "");
    let manifest = fs::read_to_string(manifest_path_for(&out)).unwrap();
    let kv = KvReport::parse(&manifest);
    assert_eq!(kv.get("subcommand"), Some("threshold"));
    assert_eq!(kv.get("output"), Some(out_s.as_str()));
    assert_eq!(kv.get("step"), Some("deterministic:-1"));
    assert!(kv.get(TIMESTAMP_KEY).is_some());

    let explicit = dir.path().join("elsewhere.txt");
    ok(&["report", "--utility", "--output", &out_s, "--manifest", &explicit.display().to_string()], "");
    assert_eq!(KvReport::parse(&fs::read_to_string(&explicit).unwrap()).get("kind"), Some("utility"));

    let r = run(&["report", "--utility"], "");
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("n,alpha_u_1,"));
    assert_eq!(KvReport::parse(&r.stderr).get("tool"), Some("stopwait"));
}

#[test]
fn seed_falls_back_to_environment() {
    // The only test touching this variable.
    std::env::set_var("STOPWAIT_SEED", "31");
    let from_env = run(&["simulate", "--questions", "20"], "");
    std::env::remove_var("STOPWAIT_SEED");
    let explicit = run(&["simulate", "--questions", "20", "--seed", "31"], "");
    let other = run(&["simulate", "--questions", "20", "--seed", "32"], "");
    assert_eq!(from_env.code, 0, "{}", from_env.stderr);
    assert_eq!(from_env.stdout, explicit.stdout);
    assert_ne!(from_env.stdout, other.stdout);
    assert_eq!(KvReport::parse(&from_env.stderr).get("seed"), Some("31"));
}

#[test]
fn utility_report_matches_library() {
    let out = ok(&["report", "--utility", "--beta1", "0.05"], "");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,alpha_u_1,alpha_u_2,alpha_u_3,alpha_u_4"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 51);
    for row in &rows {
        let n = row[0] as u32;
        for (k, alpha_u) in [1.0, 2.0, 3.0, 4.0].into_iter().enumerate() {
            assert_eq!(row[k + 1], utility(&UtilitySpec::new(alpha_u, 0.05), n));
        }
    }

    let single = ok(&["report", "--utility", "--alpha-u", "-0.5"], "");
    assert!(single.starts_with("n,alpha_u_-0.5\n0,0\n"), "{single}");
}

#[test]
fn threshold_csv_reports_deterministic_step() {
    let out = ok(&["threshold", "--step-det", "-1", "--discount", "0.9", "--grid", "-5:15:401"], "");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x,V,continuation"));
    let summary = out.lines().last().unwrap();
    let x_star: f64 = summary
        .trim_start_matches("# ")
        .split(',')
        .find_map(|kv| kv.strip_prefix("x_star="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((x_star - 1.0).abs() <= 0.05, "{x_star}");
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 402);
}

#[test]
fn passage_times_feed_invgauss_fit() {
    let dir = tempfile::tempdir().unwrap();
    let times = dir.path().join("times.csv").display().to_string();
    ok(&["passage", "--paths", "4000", "--dt", "1e-3", "--mu", "2", "--lambda", "4", "--seed", "3", "--output", &times], "");
    let report = ok(&["fit-invgauss", "--column", "passage_time", "--input", &times], "");
    let kv = KvReport::parse(&report);
    let num = |k: &str| kv.get(k).unwrap().parse::<f64>().unwrap();
    assert_eq!(num("n"), 4000.0);
    assert!((num("mu") - 2.0).abs() < 0.1, "{report}");
    assert!((num("lambda") - 4.0).abs() < 0.4, "{report}");
    assert!(num("ks_distance") < 0.03, "{report}");

    let missing = run(&["fit-invgauss", "--column", "nope", "--input", &times], "");
    assert_eq!(missing.code, 2);
    assert!(missing.stderr.contains("no column `nope`"), "{}", missing.stderr);
}

#[test]
fn correlate_and_histogram_read_simulated_logs() {
    let log = ok(&["simulate", "--questions", "400", "--rate", "0.2", "--alpha-u", "1", "--seed", "8"], "");
    let kv = KvReport::parse(&ok(&["correlate"], &log));
    assert_eq!(kv.get("model"), Some("pearson"));
    let r: f64 = kv.get("r").unwrap().parse().unwrap();
    let (lo, hi): (f64, f64) = (kv.get("ci_low").unwrap().parse().unwrap(), kv.get("ci_high").unwrap().parse().unwrap());
    assert!(lo <= r && r <= hi && (-1.0..=1.0).contains(&r));

    let hist = ok(&["report", "--histogram", "--bin", "6"], &log);
    assert!(hist.starts_with("bin_start,count,fraction\n0,"));
    let total: u64 = hist
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    let footer = hist.lines().last().unwrap();
    assert!(footer.starts_with(&format!("# questions={total},")), "{footer}");

    let invg = KvReport::parse(&ok(&["fit-invgauss", "--tail", "2:20"], &log));
    assert!(invg.get("tail_slope").is_some());
}

#[test]
fn jsonl_and_csv_logs_expand_identically() {
    let csv = ok(&["simulate", "--questions", "50", "--seed", "4"], "");
    let jsonl = ok(&["simulate", "--questions", "50", "--seed", "4", "--format", "jsonl"], "");
    assert_ne!(csv, jsonl);
    assert_eq!(ok(&["expand"], &csv), ok(&["expand", "--format", "jsonl"], &jsonl));
    let table = ok(&["fit-logit", "--table"], &ok(&["expand"], &ok(&["simulate", "--questions", "300", "--seed", "4"], "")));
    assert!(table.starts_with("term,estimate,std_error,z,significance\nalpha,"));
}
