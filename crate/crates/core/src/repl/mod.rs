//! The interactive session: commands, evaluation, and rendered output.

pub mod docs;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::builtins::Builtin;
use crate::desugar::{desugar_module, CoreModule};
use crate::error::{doc_url, DiscoError, Result};
use crate::infer::{check_module, check_property, infer_expr, node_id, AbsKind, Elab, Globals};
use crate::interp::{show, Env, Limits, Machine, Program};
use crate::oeis::SequenceFetcher;
use crate::prop::{render_report, GenConfig, TestResult, Tester, Verdict};
use crate::syntax::ast::*;
use crate::syntax::{
    parse_expr, parse_module, parse_repl_input, pretty_with, Command, PrettyOptions, ReplInput,
};
use crate::types::Type;

pub const PROMPT: &str = "Disco> ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    Value,
    Type,
    Doc,
    TestReport,
    Error,
    Warning,
    Info,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputBlock {
    pub kind: BlockKind,
    pub text: String,
    #[serde(rename = "docURL", default, skip_serializing_if = "Option::is_none")]
    pub doc_url: Option<String>,
}

impl OutputBlock {
    pub fn new(kind: BlockKind, text: impl Into<String>) -> Self {
        OutputBlock {
            kind,
            text: text.into(),
            doc_url: None,
        }
    }

    pub fn error(e: &DiscoError) -> Self {
        let url = e.doc_url();
        OutputBlock {
            kind: BlockKind::Error,
            text: format!("Error: {e}\n{url}"),
            doc_url: Some(url),
        }
    }
}

/// Everything a successful `:load` installs.
#[derive(Default)]
struct Loaded {
    module: CoreModule,
    globals: Globals,
    prog: Program,
}

pub struct ReplState {
    loaded: Loaded,
    pub config: GenConfig,
    pub unicode: bool,
    pub limits: Limits,
    fetcher: Arc<dyn SequenceFetcher>,
    quit: bool,
}

/// Outcome of loading a batch of files.
pub struct LoadReport {
    pub blocks: Vec<OutputBlock>,
    /// False if loading failed or any attached test failed.
    pub ok: bool,
}

impl ReplState {
    pub fn new(fetcher: Arc<dyn SequenceFetcher>) -> Self {
        ReplState {
            loaded: Loaded::default(),
            config: GenConfig::default(),
            unicode: true,
            limits: Limits::default(),
            fetcher,
            quit: false,
        }
    }

    pub fn quit_requested(&self) -> bool {
        self.quit
    }

    /// Names of the loaded definitions, in source order.
    pub fn names(&self) -> Vec<String> {
        self.loaded.module.defs.iter().map(|d| d.name.clone()).collect()
    }

    /// Run one line of input.
    pub fn exec(&mut self, line: &str) -> Vec<OutputBlock> {
        let mut blocks = Vec::new();
        if let Err(e) = self.exec_inner(line, &mut blocks) {
            blocks.push(OutputBlock::error(&e));
        }
        blocks
    }

    fn exec_inner(&mut self, line: &str, out: &mut Vec<OutputBlock>) -> Result<()> {
        match parse_repl_input(line)? {
            ReplInput::Empty => {}
            ReplInput::Decl(_) => return Err(DiscoError::ReplDefinition),
            ReplInput::Expr(e) => self.eval(&e, out)?,
            ReplInput::Command(c) => match c {
                Command::Type(e) => out.push(self.type_of(&e)?),
                Command::Doc(name) => out.push(self.doc(&name)?),
                Command::Test(e) => self.test(&e, out)?,
                Command::Load(paths) => out.extend(self.load_paths(&paths).blocks),
                Command::Help => out.push(OutputBlock::new(BlockKind::Info, docs::HELP)),
                Command::Names => out.push(self.names_block()),
                Command::Quit => self.quit = true,
            },
        }
        Ok(())
    }

    fn echo(&self, e: &Expr, elab: &Elab) -> String {
        pretty_with(
            &elaborate(e, elab),
            PrettyOptions {
                unicode: self.unicode,
                elide_binder_types: true,
            },
        )
    }

    fn machine(&self) -> Machine<'_> {
        Machine::new(&self.loaded.prog, &*self.fetcher, self.limits)
    }

    fn eval(&self, e: &Expr, out: &mut Vec<OutputBlock>) -> Result<()> {
        let l = &self.loaded;
        let (ty, elab) = infer_expr(&l.globals, e)?;
        let t = l.prog.compile_expr(e, &elab)?;
        let mut m = self.machine();
        let v = m.eval(&t, &Env::default());
        for w in m.warnings.drain(..) {
            out.push(warning(w));
        }
        let v = v?;
        out.push(OutputBlock::new(
            BlockKind::Value,
            show(&v, Some(&ty), &l.globals.env, self.unicode),
        ));
        Ok(())
    }

    fn type_of(&self, e: &Expr) -> Result<OutputBlock> {
        let (ty, elab) = infer_expr(&self.loaded.globals, e)?;
        Ok(OutputBlock::new(
            BlockKind::Type,
            format!("{} : {}", self.echo(e, &elab), ty.display(self.unicode)),
        ))
    }

    fn test(&self, e: &Expr, out: &mut Vec<OutputBlock>) -> Result<()> {
        let (r, echo, mut warnings) = self.run_property(&self.loaded, e)?;
        out.append(&mut warnings);
        let report = render_report(&r, &echo, &self.loaded.globals.env, self.unicode);
        out.push(OutputBlock::new(BlockKind::TestReport, format!("{report}\n")));
        Ok(())
    }

    /// Check, evaluate, and test one property against `l`.
    fn run_property(&self, l: &Loaded, e: &Expr) -> Result<(TestResult, String, Vec<OutputBlock>)> {
        let elab = check_property(&l.globals, e)?;
        let echo = self.echo(e, &elab);
        let t = l.prog.compile_expr(e, &elab)?;
        let mut m = Machine::new(&l.prog, &*self.fetcher, self.limits);
        let r = match m.eval(&t, &Env::default()) {
            Ok(v) => Tester::new(&mut m, &l.globals.env, self.config).run(&v)?,
            Err(err) if err.is_runtime() => TestResult::failed(err),
            Err(err) => return Err(err),
        };
        let warnings = m.warnings.drain(..).map(warning).collect();
        Ok((r, echo, warnings))
    }

    fn doc(&self, name: &str) -> Result<OutputBlock> {
        let uni = self.unicode;
        let l = &self.loaded;
        if let Some(sig) = l.globals.sigs.get(name) {
            let mut text = format!("{name} : {}", sig.display(uni));
            if let Some(d) = l.module.docs.get(name) {
                text.push_str(&format!("\n\n{d}\n"));
            }
            return Ok(OutputBlock::new(BlockKind::Doc, text));
        }
        if let Ok(Expr::Section(op)) = parse_expr(&format!("~{name}~")) {
            let (ty, _) = infer_expr(&Globals::default(), &Expr::Section(op))?;
            let d = docs::operator(op);
            let assoc = match op.assoc() {
                Assoc::Left => "left associative",
                Assoc::Right => "right associative",
                Assoc::None => "non-associative",
            };
            let url = doc_url(d.slug);
            let text = format!(
                "~{}~ : {}\nprecedence level {}, {assoc}\n\n{}\n\n{url}\n",
                op.symbol(uni),
                uncurry(ty).display(uni),
                op.precedence(),
                d.text,
            );
            return Ok(OutputBlock {
                kind: BlockKind::Doc,
                text,
                doc_url: Some(url),
            });
        }
        if let Some(b) = Builtin::lookup(name, &l.globals.imports) {
            let sig = match docs::builtin_signature(b) {
                Some((u, a)) => (if uni { u } else { a }).to_string(),
                None => infer_expr(&l.globals, &Expr::var(name))?.0.display(uni),
            };
            let d = docs::builtin(b);
            let url = doc_url(d.slug);
            let text = format!("{name} : {sig}\n\n{}\n\n{url}\n", d.text);
            return Ok(OutputBlock {
                kind: BlockKind::Doc,
                text,
                doc_url: Some(url),
            });
        }
        Err(DiscoError::Unbound(name.to_string()))
    }

    fn names_block(&self) -> OutputBlock {
        let l = &self.loaded;
        let lines: Vec<String> = l
            .module
            .defs
            .iter()
            .map(|d| format!("{} : {}", d.name, d.sig.display(self.unicode)))
            .collect();
        OutputBlock::new(BlockKind::Info, lines.join("\n"))
    }

    /// `:load` from the file system.
    pub fn load_paths(&mut self, paths: &[String]) -> LoadReport {
        let mut files = Vec::new();
        for p in paths {
            match std::fs::read_to_string(p) {
                Ok(src) => files.push((p.clone(), src)),
                Err(e) => {
                    return LoadReport {
                        blocks: vec![OutputBlock::error(&DiscoError::Io(format!(
                            "could not read {p}: {e}."
                        )))],
                        ok: false,
                    }
                }
            }
        }
        self.load_sources(&files)
    }

    /// Load `(file name, contents)` pairs as one module, replacing the
    /// current one, and run its attached tests. On error nothing changes.
    pub fn load_sources(&mut self, files: &[(String, String)]) -> LoadReport {
        if files.is_empty() {
            return LoadReport {
                blocks: Vec::new(),
                ok: true,
            };
        }
        match self.build(files) {
            Ok((loaded, text, ok)) => {
                self.loaded = loaded;
                LoadReport {
                    blocks: vec![OutputBlock::new(BlockKind::TestReport, text)],
                    ok,
                }
            }
            Err(e) => LoadReport {
                blocks: vec![OutputBlock::error(&e)],
                ok: false,
            },
        }
    }

    fn build(&self, files: &[(String, String)]) -> Result<(Loaded, String, bool)> {
        let mut surface = SurfaceModule::default();
        let mut text = String::new();
        for (name, src) in files {
            text.push_str(&format!("Loading {name}...\n"));
            surface.decls.extend(parse_module(src)?.decls);
        }
        let module = desugar_module(&surface)?;
        let (globals, mut elab) = check_module(&module)?;
        for (_, e) in &module.tests {
            elab.extend(check_property(&globals, e)?);
        }
        let prog = Program::build(&module, &elab)?;
        let loaded = Loaded {
            module,
            globals,
            prog,
        };

        let mut all_ok = true;
        let tests = &loaded.module.tests;
        if !tests.is_empty() {
            text.push_str("Running tests...\n");
        }
        let mut i = 0;
        while i < tests.len() {
            let name = &tests[i].0;
            let mut failures = Vec::new();
            while i < tests.len() && &tests[i].0 == name {
                let (r, echo, _) = self.run_property(&loaded, &tests[i].1)?;
                if r.verdict == Verdict::CertainlyFalse {
                    failures.push(render_report(&r, &echo, &loaded.globals.env, self.unicode));
                }
                i += 1;
            }
            if failures.is_empty() {
                text.push_str(&format!("  {name}: OK\n"));
            } else {
                all_ok = false;
                text.push_str(&format!("  {name}:\n"));
                for f in failures {
                    text.push_str(&f);
                    text.push('\n');
                }
            }
        }
        text.push_str("Loaded.");
        Ok((loaded, text, all_ok))
    }
}

fn warning(w: String) -> OutputBlock {
    OutputBlock::new(BlockKind::Warning, format!("Warning: {w}"))
}

/// `a → b → c` as `a × b → c`, the way operators are documented.
fn uncurry(t: Type) -> Type {
    match t {
        Type::Arrow(a, bc) => match *bc {
            Type::Arrow(b, c) => Type::arrow(Type::prod(*a, *b), *c),
            other => Type::Arrow(a, Box::new(other)),
        },
        other => other,
    }
}

/// Copy of `e` with checker decisions made visible: `|x|` at a numeric
/// type becomes `abs(x)`.
pub fn elaborate(e: &Expr, elab: &Elab) -> Expr {
    let go = |x: &Expr| elaborate(x, elab);
    let bx = |x: &Expr| Box::new(elaborate(x, elab));
    match e {
        Expr::AbsOrCard(x) => match elab.abs_or_card.get(&node_id(e)) {
            Some(AbsKind::Card) => Expr::AbsOrCard(bx(x)),
            _ => Expr::app(Expr::var("abs"), go(x)),
        },
        Expr::Lambda(x, b) => Expr::Lambda(x.clone(), bx(b)),
        Expr::App(f, x) => Expr::App(bx(f), bx(x)),
        Expr::BinOp(op, a, b) => Expr::BinOp(*op, bx(a), bx(b)),
        Expr::UnOp(op, a) => Expr::UnOp(*op, bx(a)),
        Expr::Tuple(es) => Expr::Tuple(es.iter().map(go).collect()),
        Expr::Inj(s, x) => Expr::Inj(*s, bx(x)),
        Expr::Case(bs) => Expr::Case(
            bs.iter()
                .map(|b| Branch {
                    body: go(&b.body),
                    guards: b
                        .guards
                        .iter()
                        .map(|g| match g {
                            Guard::Bool(x) => Guard::Bool(go(x)),
                            Guard::Pat(x, p) => Guard::Pat(go(x), p.clone()),
                            Guard::Otherwise => Guard::Otherwise,
                        })
                        .collect(),
                })
                .collect(),
        ),
        Expr::Let(bs, body) => Expr::Let(bs.iter().map(|(x, v)| (x.clone(), go(v))).collect(), bx(body)),
        Expr::Comprehension(k, head, qs) => Expr::Comprehension(
            *k,
            bx(head),
            qs.iter()
                .map(|q| match q {
                    Qual::Gen(x, v) => Qual::Gen(x.clone(), go(v)),
                    Qual::Let(x, v) => Qual::Let(x.clone(), go(v)),
                    Qual::Filter(v) => Qual::Filter(go(v)),
                })
                .collect(),
        ),
        Expr::Ellipsis(k, a, b, c) => Expr::Ellipsis(*k, bx(a), b.as_deref().map(bx), bx(c)),
        Expr::Container(k, es) => Expr::Container(*k, es.iter().map(go).collect()),
        Expr::Quant(q, bs, body) => Expr::Quant(*q, bs.clone(), bx(body)),
        Expr::Var(_)
        | Expr::Nat(_)
        | Expr::Char(_)
        | Expr::Str(_)
        | Expr::Unit
        | Expr::Bool(_)
        | Expr::Section(_) => e.clone(),
    }
}

#[cfg(test)]
mod tests;
