use magic_rom::cache::{basis_file_name, load_basis, save_basis, BasisStore, FORMAT_VERSION, MAGIC};
use magic_rom::robustness::BasisMatrix;
use magic_rom::stabilizer::stabilizer_state_count;

fn round_trip(n: usize) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(basis_file_name(n));
    let b = BasisMatrix::assemble_heavy(n, u64::MAX).unwrap();
    save_basis(&b, &path).unwrap();

    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], MAGIC);
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    assert_eq!(u32_at(4), FORMAT_VERSION);
    assert_eq!(u32_at(8) as usize, n);
    assert_eq!(u64_at(12), stabilizer_state_count(n));
    assert_eq!(u64_at(20), stabilizer_state_count(n) << n);
    let index_width = if n <= 4 { 2 } else { 4 };
    let nnz = (stabilizer_state_count(n) << n) as usize;
    assert_eq!(bytes.len(), 28 + nnz * index_width + nnz.div_ceil(8) + 8);
    drop(bytes);

    let loaded = load_basis(&path).unwrap();
    assert_eq!(loaded, b);
}

#[test]
fn round_trips_up_to_four_qubits() {
    for n in 1..=4 {
        round_trip(n);
    }
}

#[test]
fn round_trips_five_qubits() {
    round_trip(5);
}

#[test]
fn store_reuses_files_across_instances() {
    let dir = tempfile::tempdir().unwrap();
    let first = BasisStore::with_dir(dir.path()).get(3).unwrap();
    let path = dir.path().join(basis_file_name(3));
    let written = std::fs::metadata(&path).unwrap().modified().unwrap();
    let second = BasisStore::with_dir(dir.path()).get(3).unwrap();
    assert_eq!(*first, *second);
    assert_eq!(std::fs::metadata(&path).unwrap().modified().unwrap(), written);
}
