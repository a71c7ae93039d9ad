//! Command dispatch.

use std::ops::RangeInclusive;

use clap::ValueEnum;
use germlab_core::germs::{
    check_commutative, word_to_map, FlowTime, FormalVectorField, Generators, GroupWord, Letter,
};
use germlab_core::multiplicity::{
    fixed_point_multiplicity_of_word, instantiate_template, intersection_multiplicity, mu_of_word,
    mu_sequence, IdealPresentation,
};
use germlab_core::quasipoly::{
    exceptional_conditions, generic_multiplicity, group_time_vars, render_jet, Generator,
    GroupOrbit, DEFAULT_MINOR_LIMIT,
};
use germlab_core::ring::parse_rational;
use germlab_core::Jet;

use crate::error::CliError;
use crate::output::{Key, Report, Row};
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Codim,
    Mu,
    MuSeq,
    FixedPoints,
    Commute,
    Bracket,
    Flow,
    Qp,
    GenericMu,
    Exceptional,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Codim => "codim",
            Command::Mu => "mu",
            Command::MuSeq => "mu-seq",
            Command::FixedPoints => "fixed-points",
            Command::Commute => "commute",
            Command::Bracket => "bracket",
            Command::Flow => "flow",
            Command::Qp => "qp",
            Command::GenericMu => "generic-mu",
            Command::Exceptional => "exceptional",
        }
    }
}

/// Resolved flag values; `None` means the flag was not given.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub word: Option<String>,
    pub range: Option<String>,
    pub pull: Option<String>,
    /// Comma-separated variety names.
    pub against: Option<String>,
    /// `+`-separated variety names.
    pub ideal: Option<String>,
    pub cap: Option<u32>,
    pub time: Option<String>,
    pub order: Option<u32>,
}

fn require<'a>(
    value: &'a Option<String>,
    flag: &str,
    command: Command,
) -> Result<&'a str, CliError> {
    value
        .as_deref()
        .ok_or_else(|| CliError::Input(format!("{} needs --{flag}", command.name())))
}

/// Parses `a..b` (inclusive), with optional signs.
pub fn parse_range(text: &str) -> Result<RangeInclusive<i64>, CliError> {
    let bad = || CliError::Input(format!("range \"{text}\" must look like a..b"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(CliError::Input(format!("range \"{text}\" is empty")));
    }
    Ok(a..=b)
}

fn varieties<'a>(
    scenario: &'a Scenario,
    list: Option<&str>,
    sep: char,
) -> Result<Vec<&'a IdealPresentation>, CliError> {
    match list {
        None => Ok(Vec::new()),
        Some(s) => s
            .split(sep)
            .map(|n| n.trim())
            .filter(|n| !n.is_empty())
            .map(|n| scenario.variety(n))
            .collect(),
    }
}

fn parse_word(text: &str) -> Result<GroupWord, CliError> {
    GroupWord::parse(text).map_err(|e| CliError::core(format!("word \"{text}\""), e))
}

// Generators named in a comma-separated list, or all of them.
fn select_generators(scenario: &Scenario, list: Option<&str>) -> Result<Generators, CliError> {
    let Some(list) = list else {
        return Ok(scenario.generators.clone());
    };
    let mut out = Generators::new();
    for name in list.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let res = if let Some(m) = scenario.generators.map(name) {
            out.add_map(name, m.clone())
        } else if let Some(f) = scenario.generators.field(name) {
            out.add_field(name, f.clone())
        } else {
            return Err(CliError::Input(format!("unknown generator \"{name}\"")));
        };
        res.map_err(|e| CliError::core(format!("generator {name}"), e))?;
    }
    Ok(out)
}

fn order_flag(scenario: &Scenario, flags: &Flags, cap: u32) -> u32 {
    flags
        .order
        .unwrap_or_else(|| (2 * scenario.natural_order).min(cap))
        .max(1)
}

/// Runs one command against a scenario.
pub fn run_command(
    scenario: &Scenario,
    command: Command,
    flags: &Flags,
) -> Result<Report, CliError> {
    let cap = flags.cap.unwrap_or(scenario.cap);
    if cap == 0 {
        return Err(CliError::Input("--cap must be positive".into()));
    }
    let mut report = Report::new(command.name(), cap);
    let names = &scenario.variables;
    match command {
        Command::Codim => {
            let ideal = require(&flags.ideal, "ideal", command)?;
            let parts = varieties(scenario, Some(ideal), '+')?;
            let c = intersection_multiplicity(&parts, cap)
                .map_err(|e| CliError::core(format!("codim {ideal}"), e))?;
            report.rows.push(Row::Mu {
                key: Key::Text(ideal.to_string()),
                codim: c,
            });
        }
        Command::Mu => {
            let word_text = require(&flags.word, "word", command)?;
            let word = parse_word(word_text)?;
            let pulled = scenario.variety(require(&flags.pull, "pull", command)?)?;
            let fixed = varieties(scenario, flags.against.as_deref(), ',')?;
            let c = mu_of_word(&word, &scenario.generators, pulled, &fixed, cap)
                .map_err(|e| CliError::core(format!("mu of {word_text}"), e))?;
            report.rows.push(Row::Mu {
                key: Key::Text(word_text.to_string()),
                codim: c,
            });
        }
        Command::MuSeq => {
            let template = require(&flags.word, "word", command)?;
            let range = parse_range(require(&flags.range, "range", command)?)?;
            let pulled = scenario.variety(require(&flags.pull, "pull", command)?)?;
            let fixed = varieties(scenario, flags.against.as_deref(), ',')?;
            let seq = mu_sequence(template, range, &scenario.generators, pulled, &fixed, cap);
            report.key_name = "n";
            for (n, r) in seq.entries {
                let c = r.map_err(|e| {
                    CliError::core(
                        format!("mu-seq at n={n} ({})", instantiate_template(template, n)),
                        e,
                    )
                })?;
                report.rows.push(Row::Mu {
                    key: Key::Int(n),
                    codim: c,
                });
            }
            if let Some(m) = seq.max_finite {
                report.notes.push(format!("max finite value {m}"));
            }
        }
        Command::FixedPoints => {
            let template = require(&flags.word, "word", command)?;
            let words: Vec<(Key, String)> = match &flags.range {
                Some(r) => {
                    report.key_name = "n";
                    parse_range(r)?
                        .map(|n| (Key::Int(n), instantiate_template(template, n)))
                        .collect()
                }
                None => vec![(Key::Text(template.to_string()), template.to_string())],
            };
            let results: Vec<_> = words
                .iter()
                .map(|(key, w)| {
                    let word = parse_word(w)?;
                    fixed_point_multiplicity_of_word(&word, &scenario.generators, cap)
                        .map(|c| Row::Mu {
                            key: key.clone(),
                            codim: c,
                        })
                        .map_err(|e| CliError::core(format!("fixed points of {w}"), e))
                })
                .collect();
            for r in results {
                report.rows.push(r?);
            }
        }
        Command::Commute => {
            let gens = select_generators(scenario, flags.word.as_deref())?;
            let order = order_flag(scenario, flags, cap);
            let gens = with_order(&gens, order)?;
            let cert = check_commutative(&gens).map_err(|e| CliError::core("commute", e))?;
            report.verdict = Some(cert.passes());
            report
                .notes
                .push(format!("checked up to order {}", cert.order));
            for c in cert.checks {
                report.rows.push(Row::Check {
                    condition: c.condition.to_string(),
                    left: c.left,
                    right: c.right,
                    holds: c.holds,
                });
            }
        }
        Command::Bracket => {
            let pair = require(&flags.word, "word", command)?;
            let inner = pair.trim().trim_start_matches('[').trim_end_matches(']');
            let (a, b) = inner.split_once(',').ok_or_else(|| {
                CliError::Input(format!("bracket needs --word \"v,w\", got \"{pair}\""))
            })?;
            let order = order_flag(scenario, flags, cap);
            let field = |n: &str| -> Result<FormalVectorField, CliError> {
                scenario
                    .generators
                    .require_field(n.trim())
                    .map(|f| f.with_order(order))
                    .map_err(|e| CliError::core("bracket", e))
            };
            let br = field(a)?
                .lie_bracket(&field(b)?)
                .map_err(|e| CliError::core("bracket", e))?;
            report.rows.push(Row::Components {
                key: format!("[{},{}]", a.trim(), b.trim()),
                components: br.render(names),
            });
            report.notes.push(format!("truncated at order {order}"));
        }
        Command::Flow => {
            let text = require(&flags.word, "word", command)?;
            let order = order_flag(scenario, flags, cap);
            let words = if scenario.generators.field(text.trim()).is_some() {
                let field = text.trim().to_string();
                let times = match &flags.time {
                    Some(grid) => grid
                        .split(',')
                        .map(|t| {
                            parse_rational(t.trim())
                                .map(FlowTime::Rational)
                                .map_err(|e| CliError::core(format!("time \"{}\"", t.trim()), e))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                    None => vec![FlowTime::Symbol("t".into())],
                };
                times
                    .into_iter()
                    .map(|time| {
                        GroupWord::new(vec![Letter::Flow {
                            field: field.clone(),
                            time,
                        }])
                    })
                    .collect()
            } else {
                if flags.time.is_some() {
                    return Err(CliError::Input(
                        "--time applies only when --word names a field".into(),
                    ));
                }
                vec![parse_word(text)?]
            };
            for word in words {
                let map = word_to_map(&word, &scenario.generators, order)
                    .map_err(|e| CliError::core(format!("flow {word}"), e))?;
                report.rows.push(Row::Components {
                    key: word.to_string(),
                    components: map.render(names),
                });
            }
            report.notes.push(format!("truncated at order {order}"));
        }
        Command::Qp => {
            let gens = select_generators(scenario, flags.word.as_deref())?;
            let order = order_flag(scenario, flags, cap);
            let (gen_names, group) = group_list(&gens);
            let vars = group_time_vars(&group);
            let mut orbit = GroupOrbit::new(&group, scenario.dim(), order)
                .map_err(|e| CliError::core("qp", e))?;
            let targets: Vec<(String, Jet)> = match &flags.pull {
                Some(p) => scenario
                    .variety(p)?
                    .generators()
                    .iter()
                    .enumerate()
                    .map(|(i, g)| (format!("{p}[{}]", i + 1), g.clone()))
                    .collect(),
                None => (0..scenario.dim())
                    .map(|i| (names[i].clone(), Jet::variable(scenario.dim(), order, i)))
                    .collect(),
            };
            for (key, f) in targets {
                let pulled = orbit
                    .pullback(&f)
                    .map_err(|e| CliError::core(format!("qp of {key}"), e))?;
                report.rows.push(Row::Components {
                    key,
                    components: vec![render_jet(&pulled, names, &vars)],
                });
            }
            for (i, n) in gen_names.iter().enumerate() {
                report
                    .notes
                    .push(format!("{} is the time of {n}", vars.name(i)));
            }
            report.notes.push(format!("truncated at order {order}"));
        }
        Command::GenericMu => {
            let gens = select_generators(scenario, flags.word.as_deref())?;
            let pulled = scenario.variety(require(&flags.pull, "pull", command)?)?;
            let fixed = varieties(scenario, flags.against.as_deref(), ',')?;
            let g = generic_multiplicity(&gens, pulled, &fixed, cap)
                .map_err(|e| CliError::core("generic-mu", e))?;
            report.rows.push(Row::Mu {
                key: Key::Text("generic".into()),
                codim: germlab_core::Codim {
                    value: g.value,
                    certificate_order: g.stopping_order,
                },
            });
            for (i, n) in g.generator_names.iter().enumerate() {
                report
                    .notes
                    .push(format!("{} is the time of {n}", g.time_vars.name(i)));
            }
        }
        Command::Exceptional => {
            let gens = select_generators(scenario, flags.word.as_deref())?;
            let pulled = scenario.variety(require(&flags.pull, "pull", command)?)?;
            let fixed = varieties(scenario, flags.against.as_deref(), ',')?;
            let m = match flags.order {
                Some(m) => m,
                None => generic_multiplicity(&gens, pulled, &fixed, cap)
                    .map_err(|e| CliError::core("exceptional", e))?
                    .stopping_order
                    .ok_or_else(|| {
                        CliError::Input(format!(
                            "generic multiplicity did not stabilize below cap {cap}; pass --order"
                        ))
                    })?,
            };
            let ex = exceptional_conditions(&gens, pulled, &fixed, m, DEFAULT_MINOR_LIMIT)
                .map_err(|e| CliError::core("exceptional", e))?;
            for (i, q) in ex.conditions.iter().enumerate() {
                report.rows.push(Row::Condition {
                    index: i,
                    condition: q.render(&ex.time_vars),
                });
            }
            report
                .notes
                .push(format!("order {m}, minors of size {}", ex.minor_size));
            for (i, n) in ex.generator_names.iter().enumerate() {
                report
                    .notes
                    .push(format!("{} is the time of {n}", ex.time_vars.name(i)));
            }
        }
    }
    Ok(report)
}

fn with_order(gens: &Generators, order: u32) -> Result<Generators, CliError> {
    let mut out = Generators::new();
    for (n, m) in gens.maps() {
        out.add_map(n, m.with_order(order))
            .map_err(|e| CliError::core(format!("map {n}"), e))?;
    }
    for (n, f) in gens.fields() {
        out.add_field(n, f.with_order(order))
            .map_err(|e| CliError::core(format!("field {n}"), e))?;
    }
    Ok(out)
}

// Maps first, then fields, matching the time-variable numbering of the
// generic computations.
fn group_list(gens: &Generators) -> (Vec<String>, Vec<Generator>) {
    let mut names = Vec::new();
    let mut group = Vec::new();
    for (n, m) in gens.maps() {
        names.push(n.clone());
        group.push(Generator::Map(m.clone()));
    }
    for (n, f) in gens.fields() {
        names.push(n.clone());
        group.push(Generator::Field(f.clone()));
    }
    (names, group)
}
