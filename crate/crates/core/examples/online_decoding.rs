// Stream observations through the online decoder. Committed pieces never
// change and, glued to the flushed tail, reproduce the offline path.

use pmm_viterbi::online::{open_stream, DecoderConfig};
use pmm_viterbi::{canonical, simulate, viterbi_path, Seed, TieRule};

pub fn run_example() -> Result<(usize, usize), Box<dyn std::error::Error>> {
    let model = canonical::two_state_pmm();
    let traj = simulate(&model, 5_000, Seed(3))?;
    let mut stream = open_stream(&model, DecoderConfig::new(1));
    let mut pieces = 0;
    for o in &traj.observations {
        if let Some(piece) = stream.push(o.clone())? {
            assert_eq!(&stream.committed()[piece.start..], &piece.states[..]);
            pieces += 1;
        }
    }
    let committed = stream.committed().to_vec();
    let tail = stream.flush()?;
    let mut full = committed.clone();
    full.extend_from_slice(&tail.states);
    let offline = viterbi_path(&model, &traj.observations, &TieRule::Lexicographic)?;
    assert_eq!(full.len(), offline.path.len());
    Ok((pieces, committed.len()))
}

#[allow(dead_code)]
fn main() {
    let (pieces, committed) = run_example().expect("online");
    println!("{pieces} pieces, {committed} states committed");
}
