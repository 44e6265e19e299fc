use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use hseal::analysis::{report_csv, stability_report};
use hseal::envelope::rsa_keygen;
use hseal::session::SessionParams;
use hseal::sum_protocol::{run_sum_protocol, shared_key_session};
use hseal::wire::{BundleFile, Mode};
use hseal::{
    auth_send, auth_verify, decrypt_session, encrypt_session, infer_order, read_bundle,
    session_rng, write_bundle, AuthResult, RsaPrivateKey, RsaPublicKey,
};

#[derive(Parser)]
#[command(
    name = "hseal",
    version,
    about = "Hilbert-matrix session cipher (teaching tool, not secure)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a textbook RSA key pair.
    Keygen {
        #[arg(long, default_value_t = 256)]
        bits: u32,
        #[arg(long)]
        out_pub: PathBuf,
        #[arg(long)]
        out_priv: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a file for the holder of a public key.
    Encrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Matrix order (prime). Drawn at random when omitted.
        #[arg(long, requires = "m")]
        n: Option<usize>,
        /// Block size, 1 <= m < n.
        #[arg(long, requires = "n")]
        m: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decrypt a bundle file.
    Decrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "priv")]
        private: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt with per-block garbage envelopes for authentication.
    AuthSend {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, requires = "m")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        m: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify and decrypt an authenticated bundle. Exits 0 only if authentic.
    AuthVerify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "priv")]
        private: PathBuf,
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the ring sum protocol and print every hop.
    SumDemo {
        #[arg(long, value_delimiter = ',', required = true)]
        secrets: Vec<u64>,
        #[arg(long)]
        blind: u64,
    },
    /// Agree on the order with the ring sum protocol, then encrypt.
    SharedEncrypt {
        #[arg(long, value_delimiter = ',', required = true)]
        secrets: Vec<u64>,
        #[arg(long)]
        blind: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Show what a bundle reveals without any key.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Float versus exact Hilbert inversion residuals as CSV.
    Stability {
        #[arg(long, default_value_t = 15)]
        max_order: usize,
    },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, data: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, data).with_context(|| format!("writing {}", path.display()))
}

fn public_key(path: &Path) -> Result<RsaPublicKey> {
    read_text(path)?
        .parse()
        .with_context(|| format!("parsing public key {}", path.display()))
}

fn private_key(path: &Path) -> Result<RsaPrivateKey> {
    read_text(path)?
        .parse()
        .with_context(|| format!("parsing private key {}", path.display()))
}

fn bundles(path: &Path) -> Result<Vec<hseal::CipherBundle>> {
    read_bundle(&read(path)?).with_context(|| format!("parsing bundle {}", path.display()))
}

fn fixed_params(n: Option<usize>, m: Option<usize>) -> Result<Option<SessionParams>> {
    match (n, m) {
        (Some(n), Some(m)) => Ok(Some(SessionParams::new(n, m)?)),
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Keygen {
            bits,
            out_pub,
            out_priv,
            seed,
        } => {
            let (pk, sk) = rsa_keygen(bits, &mut session_rng(seed))?;
            write(&out_pub, pk.to_string())?;
            write(&out_priv, sk.to_string())?;
        }
        Command::Encrypt {
            input,
            public,
            out,
            n,
            m,
            seed,
        } => {
            let params = fixed_params(n, m)?;
            let b = encrypt_session(
                &read(&input)?,
                &public_key(&public)?,
                params.as_ref(),
                &mut session_rng(seed),
            )?;
            write(&out, write_bundle(&b)?)?;
        }
        Command::AuthSend {
            input,
            public,
            out,
            n,
            m,
            seed,
        } => {
            let params = fixed_params(n, m)?;
            let b = auth_send(
                &read(&input)?,
                &public_key(&public)?,
                params.as_ref(),
                &mut session_rng(seed),
            )?;
            write(&out, write_bundle(&b)?)?;
        }
        Command::Decrypt {
            input,
            private,
            out,
        } => {
            let msg = decrypt_session(&bundles(&input)?, &private_key(&private)?)?;
            write(&out, msg)?;
        }
        Command::AuthVerify {
            input,
            private,
            public,
            out,
        } => {
            let result = auth_verify(
                &bundles(&input)?,
                &private_key(&private)?,
                &public_key(&public)?,
            )?;
            match result {
                AuthResult::Authenticated { plaintext } => {
                    write(&out, plaintext)?;
                    eprintln!("authenticated");
                }
                AuthResult::Rejected(reason) => {
                    eprintln!("rejected: {reason}");
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::SumDemo { secrets, blind } => {
            print!("{}", run_sum_protocol(&secrets, blind)?);
        }
        Command::SharedEncrypt {
            secrets,
            blind,
            input,
            public,
            out,
            seed,
        } => {
            let (session, b) = shared_key_session(
                &secrets,
                blind,
                &read(&input)?,
                &public_key(&public)?,
                &mut session_rng(seed),
            )?;
            eprint!("{}", session.transcript);
            write(&out, write_bundle(&b)?)?;
        }
        Command::Inspect { input } => {
            let file = BundleFile::parse(&read_text(&input)?)?;
            let b = file.clone().into_bundles();
            println!("order: {}", infer_order(&b[0]));
            println!("mode: {}", file.mode);
            println!("blocks: {}", file.blocks.len());
            if file.mode == Mode::Authenticated {
                // One tag element per garbage byte, so this is n - m.
                println!(
                    "garbage length: {}",
                    b[0].k_env.as_ref().map_or(0, |k| k.len())
                );
            }
        }
        Command::Stability { max_order } => {
            print!("{}", report_csv(&stability_report(max_order)?));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
