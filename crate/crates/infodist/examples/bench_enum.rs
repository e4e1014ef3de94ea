use infodist::bits::{all_strings_up_to, BitString};
use infodist::enumerator::{build_table, enumerate_with_programs, EnumerationConfig};
use infodist::MachineSpec;
use std::time::Instant;

fn main() {
    let spec = MachineSpec::upm1();
    let nproc = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    println!("available parallelism: {nproc}");

    // criterion 1 scale: empty condition, L=22, T=4096
    let cfg = EnumerationConfig { workers: 1, ..Default::default() };
    let t0 = Instant::now();
    let (slice, programs) = enumerate_with_programs(&spec, &BitString::new(), &cfg).unwrap();
    println!("eps (22,4096) 1 worker: {:?}, programs={}, entries={}", t0.elapsed(), programs.len(), slice.entries().len());

    // full default domain (strings <= 4 bits)
    let conds = all_strings_up_to(4);
    let cfg8 = EnumerationConfig { workers: nproc, ..Default::default() };
    let t0 = Instant::now();
    let table = build_table(&spec, &conds, &cfg8).unwrap();
    println!("31 conds (22,4096) {} workers: {:?}", nproc, t0.elapsed());
    println!("K(eps)={:?} K(0)={:?} K(0000)={:?}",
        table.k_plain(&BitString::new()).unwrap(),
        table.k_plain(&BitString::from_bits_str("0").unwrap()).unwrap(),
        table.k_plain(&BitString::from_bits_str("0000").unwrap()).unwrap());
    // are all 4-bit conditionals 15?
    let a = BitString::from_bits_str("0101").unwrap();
    let b = BitString::from_bits_str("1010").unwrap();
    println!("K(1010|0101)={:?} K(0101|0101)={:?}", table.k_cond(&b,&a).unwrap(), table.k_cond(&a,&a).unwrap());
    println!("kraft(eps)={}", table.kraft_sum(&BitString::new()).unwrap());

    // criterion 5 scale: (24, 16384) on eps
    let cfg24 = EnumerationConfig { max_program_len: 24, step_budget: 16384, workers: nproc, ..Default::default() };
    let t0 = Instant::now();
    let (slice24, _) = enumerate_with_programs(&spec, &BitString::new(), &cfg24).unwrap();
    println!("eps (24,16384) {} workers: {:?}, entries={}", nproc, t0.elapsed(), slice24.entries().len());
    for (out, k) in slice24.entries() { if slice.entries().get(out).map_or(false, |k0| k > k0) { println!("REGRESSION {out}"); } }
    println!("hist22 total programs: {}", slice.length_hist().values().sum::<u64>());
    println!("hist24 total programs: {}", slice24.length_hist().values().sum::<u64>());
}
