//! Built-in documentation for operators and primitive functions.

use crate::builtins::Builtin;
use crate::syntax::ast::BinOp;

pub struct OpDoc {
    pub text: &'static str,
    pub slug: &'static str,
}

pub fn operator(op: BinOp) -> OpDoc {
    use BinOp::*;
    let (text, slug) = match op {
        Add => ("The sum of two numbers, types, or graphs.", "addition"),
        Sub => ("The difference of two numbers.", "subtraction"),
        Monus => (
            "Truncated subtraction: the difference, or zero if it would be negative.",
            "monus",
        ),
        Mul => ("The product of two numbers.", "multiplication"),
        Div => ("The quotient of two numbers.", "division"),
        Pow => ("Raise a number to a power.", "exponentiation"),
        Mod => ("The remainder after integer division.", "mod"),
        Divides => ("Whether the first number evenly divides the second.", "divides"),
        Eq => ("Whether two values are equal.", "compare"),
        Neq => ("Whether two values are different.", "compare"),
        Lt => ("Whether the first value is less than the second.", "compare"),
        Gt => ("Whether the first value is greater than the second.", "compare"),
        Le => ("Whether the first value is at most the second.", "compare"),
        Ge => ("Whether the first value is at least the second.", "compare"),
        And => ("Logical conjunction.", "logic-ops"),
        Or => ("Logical disjunction.", "logic-ops"),
        Implies => ("Logical implication.", "logic-ops"),
        Union => ("The union of two sets or bags.", "set-ops"),
        Intersect => ("The intersection of two sets or bags.", "set-ops"),
        Diff => (
            "The elements of the first set or bag not in the second.",
            "set-ops",
        ),
        Cons => ("Put an element on the front of a list.", "list"),
    };
    OpDoc { text, slug }
}

/// Signatures shown for builtins whose inferred type is only meaningful
/// at a particular instance, as (unicode, ascii).
pub fn builtin_signature(b: Builtin) -> Option<(&'static str, &'static str)> {
    match b {
        Builtin::Abs => Some(("ℤ → ℕ", "Z -> N")),
        Builtin::Floor | Builtin::Ceiling => Some(("ℚ → ℤ", "Q -> Z")),
        _ => None,
    }
}

pub fn builtin(b: Builtin) -> OpDoc {
    use Builtin::*;
    let (text, slug) = match b {
        Abs => ("The absolute value of a number.", "abs"),
        Floor => ("The largest integer not above a number.", "floor"),
        Ceiling => ("The smallest integer not below a number.", "ceiling"),
        Min => ("The smaller of two values.", "min"),
        Max => ("The larger of two values.", "max"),
        Each => ("Apply a function to every element of a collection.", "each"),
        Filter => (
            "Keep the elements of a collection that satisfy a predicate.",
            "filter",
        ),
        Reduce => ("Combine the elements of a collection, right to left.", "reduce"),
        Power => ("The set of all subsets of a set.", "power"),
        List => ("The elements of a collection as a list.", "list"),
        Bag => ("The elements of a collection as a bag.", "bag"),
        Set => ("The elements of a collection as a set.", "set"),
        IsPrime => ("Whether a natural number is prime.", "isPrime"),
        LookupSequence => (
            "The OEIS entry for the first sequence starting with the given terms.",
            "oeis",
        ),
        ExtendSequence => (
            "More terms of the first OEIS sequence starting with the given terms.",
            "oeis",
        ),
    };
    OpDoc { text, slug }
}

pub const HELP: &str = "\
Commands:
  :type e        show the type of an expression
  :doc name      show documentation for a definition, builtin, or operator
  :test p        test a property
  :load file...  load definitions from files and run their tests
  :names         list loaded definitions
  :help          show this message
  :quit          leave the REPL
Anything else is evaluated as an expression.";
