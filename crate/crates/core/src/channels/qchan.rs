//! `QCHAN 1` text format.
//!
//! ```text
//! QCHAN 1
//! <d_in> <d_out>
//! kraus <n>        (or: choi)
//! <n QMAT blocks>  (or: one QMAT block, (out ⊗ in) ordering)
//! ```

use std::path::Path;

use super::QuantumChannel;
use crate::error::{Error, Result};
use crate::matcore::{format_qmat, Tokens};

/// Which representation a QCHAN file carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QchanForm {
    Kraus,
    Choi,
}

pub fn format_qchan(channel: &QuantumChannel, form: QchanForm) -> String {
    let mut out = format!("QCHAN 1\n{} {}\n", channel.d_in(), channel.d_out());
    match form {
        QchanForm::Kraus => {
            out.push_str(&format!("kraus {}\n", channel.kraus().len()));
            for k in channel.kraus() {
                out.push_str(&format_qmat(k));
            }
        }
        QchanForm::Choi => {
            out.push_str("choi\n");
            out.push_str(&format_qmat(channel.choi()));
        }
    }
    out
}

pub fn parse_qchan(text: &str) -> Result<QuantumChannel> {
    let mut tokens = Tokens::new(text);
    tokens.expect("QCHAN")?;
    tokens.expect("1")?;
    let d_in = tokens.usize("input dimension")?;
    let d_out = tokens.usize("output dimension")?;
    let form_line = tokens.line();
    let (_, form) = tokens.next("`kraus` or `choi`")?;
    let at = |line: usize, e: Error| match e {
        Error::InvalidInput(message) | Error::DomainError(message) => Error::ParseError { line, message },
        other => other,
    };
    let channel = match form {
        "kraus" => {
            let n = tokens.usize("Kraus count")?;
            let mut kraus = Vec::with_capacity(n);
            for _ in 0..n {
                kraus.push(tokens.qmat()?);
            }
            QuantumChannel::from_kraus(d_in, d_out, kraus).map_err(|e| at(form_line, e))?
        }
        "choi" => {
            let choi = tokens.qmat()?;
            QuantumChannel::from_choi(d_in, d_out, choi, 1e-14).map_err(|e| at(form_line, e))?
        }
        other => {
            return Err(Error::ParseError {
                line: form_line,
                message: format!("expected `kraus` or `choi`, found `{other}`"),
            })
        }
    };
    tokens.finish()?;
    Ok(channel)
}

pub fn read_qchan_file(path: impl AsRef<Path>) -> Result<QuantumChannel> {
    parse_qchan(&std::fs::read_to_string(path)?)
}

pub fn write_qchan_file(path: impl AsRef<Path>, channel: &QuantumChannel, form: QchanForm) -> Result<()> {
    std::fs::write(path, format_qchan(channel, form))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::frobenius;
    use crate::random::{random_channel, seeded};

    #[test]
    fn kraus_and_choi_round_trip() {
        let ch = random_channel(2, 3, &mut seeded(40));
        let k = parse_qchan(&format_qchan(&ch, QchanForm::Kraus)).unwrap();
        assert_eq!(k.kraus(), ch.kraus());
        let c = parse_qchan(&format_qchan(&ch, QchanForm::Choi)).unwrap();
        assert!(frobenius(&(c.choi() - ch.choi())) < 1e-12);
        assert_eq!((c.d_in(), c.d_out()), (2, 3));
    }

    #[test]
    fn identity_from_text() {
        let text = "QCHAN 1\n2 2\nkraus 1\nQMAT 1\n2 2\n1,0 0,0\n0,0 1,0\n";
        let ch = parse_qchan(text).unwrap();
        assert_eq!(ch.kraus().len(), 1);
    }

    #[test]
    fn errors_carry_lines() {
        let bad_form = "QCHAN 1\n2 2\nunitary\n";
        assert!(matches!(parse_qchan(bad_form), Err(Error::ParseError { line: 3, .. })));
        let not_tp = "QCHAN 1\n1 1\nkraus 1\nQMAT 1\n1 1\n2,0\n";
        assert!(matches!(parse_qchan(not_tp), Err(Error::ParseError { line: 3, .. })));
        let bad_dims = "QCHAN 1\n2 x\n";
        assert!(matches!(parse_qchan(bad_dims), Err(Error::ParseError { line: 2, .. })));
    }
}
