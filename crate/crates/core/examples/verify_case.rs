use qbilinear::identities::{sample_case, verify, SamplerConfig};
use qbilinear::{IdentityId, QBase};

fn main() -> qbilinear::Result<()> {
    let q = QBase::parse("1/3")?;
    let case = sample_case(IdentityId::Mf, &[2, 1, 1, 2], &q, 3, 42, &SamplerConfig::default())?;
    let report = verify(&case)?;
    assert!(report.equal);
    println!("{}", serde_json::to_string_pretty(&report.to_json(false)).unwrap());
    Ok(())
}
