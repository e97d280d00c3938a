//! The drift-stream testbench as option strings.

/// Recurrent SEA wrapper row.
pub const SEA_RECURRENT: &str =
    "RecurrentConceptDriftStream -x 200000 -y 200000 -z 100 -s (SEAGenerator -f 2 -i 2) -d (SEAGenerator -f 3 -i 3)";

/// Recurrent STAGGER wrapper row.
pub const STAGGER_RECURRENT: &str =
    "RecurrentConceptDriftStream -x 200000 -y 200000 -z 100 -s (STAGGERGenerator -i 2 -f 2) -d (STAGGERGenerator -i 3 -f 3)";

pub const HYPERPLANE_ROWS: [&str; 6] = [
    "HyperplaneGenerator -k 10 -t 0.0001 -i 2",
    "HyperplaneGenerator -k 10 -t 0.001 -i 2",
    "HyperplaneGenerator -k 10 -t 0.01 -i 2",
    "HyperplaneGenerator -k 5 -t 0.0001 -i 2",
    "HyperplaneGenerator -k 5 -t 0.001 -i 2",
    "HyperplaneGenerator -k 5 -t 0.01 -i 2",
];

/// Recurrent abrupt-drift rows, in table order.
pub const ABRUPT_ROWS: [&str; 10] = [
    "AbruptDriftGenerator -c  -o 1.0 -z 2 -n 2 -v 2 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c  -o 1.0 -z 3 -n 2 -v 2 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c  -o 1.0 -z 3 -n 3 -v 2 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c  -o 1.0 -z 3 -n 3 -v 3 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c  -o 1.0 -z 3 -n 3 -v 4 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c  -o 1.0 -z 3 -n 3 -v 5 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c  -o 1.0 -z 4 -n 2 -v 2 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c  -o 1.0 -z 4 -n 4 -v 4 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c  -o 1.0 -z 5 -n 2 -v 2 -r 2 -b 200000 -d Recurrent",
    "AbruptDriftGenerator -c  -o 1.0 -z 5 -n 5 -v 5 -r 2 -b 200000 -d Recurrent",
];

/// Rows naming generators this crate does not implement.
pub const OUT_OF_SCOPE_ROWS: [&str; 14] = [
    "RecurrentConceptDriftStream -x 200000 -y 200000 -z 100 -s (AgrawalGenerator -f 2 -i 2) -d (AgrawalGenerator -f 3 -i 3)",
    "RecurrentConceptDriftStream -x 200000 -y 200000 -z 100 -s (RandomTreeGenerator -r 1 -i 1) -d (RandomTreeGenerator -r 2 -i 2)",
    "LEDGeneratorDrift -d 1 -i 2",
    "LEDGeneratorDrift -d 3 -i 2",
    "LEDGeneratorDrift -d 5 -i 2",
    "LEDGeneratorDrift -d 7 -i 2",
    "RandomRBFGeneratorDrift -s 0.0001 -k 10 -i 2 -r 2",
    "RandomRBFGeneratorDrift -s 0.0001 -k 50 -i 2 -r 2",
    "RandomRBFGeneratorDrift -s 0.001 -k 10 -i 2 -r 2",
    "RandomRBFGeneratorDrift -s 0.001 -k 50 -i 2 -r 2",
    "WaveformGeneratorDrift -d 1 -i 2 -n",
    "WaveformGeneratorDrift -d 3 -i 2 -n",
    "WaveformGeneratorDrift -d 5 -i 2 -n",
    "WaveformGeneratorDrift -d 7 -i 2 -n",
];

/// Stream length used for every testbench row: two recurrence periods.
pub const TESTBENCH_INSTANCES: u64 = 400_000;

/// The 18 in-scope rows in table order: SEA, STAGGER, Hyperplane, abrupt drift.
pub fn in_scope_rows() -> Vec<&'static str> {
    let mut rows = vec![SEA_RECURRENT, STAGGER_RECURRENT];
    rows.extend(HYPERPLANE_ROWS);
    rows.extend(ABRUPT_ROWS);
    rows
}

/// Every row of the full 32-row table, in table order.
pub fn all_rows() -> Vec<&'static str> {
    let mut rows = vec![OUT_OF_SCOPE_ROWS[0], OUT_OF_SCOPE_ROWS[1], SEA_RECURRENT, STAGGER_RECURRENT];
    rows.extend(HYPERPLANE_ROWS);
    rows.extend(&OUT_OF_SCOPE_ROWS[2..]);
    rows.extend(ABRUPT_ROWS);
    rows
}

/// Short `attributes x values x classes` label of an abrupt-drift row.
pub fn abrupt_dimensions(row: &str) -> Option<(usize, usize, usize)> {
    let spec = crate::streams::parse_stream_spec(row).ok()?;
    if spec.generator_name() != "AbruptDriftGenerator" {
        return None;
    }
    let get = |f: &str, d: i64| spec.int(f).unwrap_or(d) as usize;
    Some((get("n", 5), get("z", 5), get("v", 5)))
}
