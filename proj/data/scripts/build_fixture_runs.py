#!/usr/bin/env python3
"""Writes the scripted provider rules and the scripted runs used for replay fixtures."""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[1]
rules = []


def rule(purpose, contains, response):
    rules.append({"purpose": purpose, "contains": contains, "response": response})


def fence(lang, code):
    return f"```{lang}\n{code}\n```"


def sql_restate(code, restated):
    rule("restate_explain", [f"SQL: {code}\n"], restated)


# sql-001: right on the first try.
q1 = "What is the grade of each high schooler?"
g1 = "SELECT grade FROM Highschooler"
rule("codegen", [q1], g1)
sql_restate(g1, "What grade is each high schooler in?")

# sql-002: misses grade 10, fixed after feedback.
q2 = "How many high schoolers are there in grade 9 or 10?"
w2 = "SELECT count(*) FROM Highschooler WHERE grade = 9"
g2 = "SELECT count(*) FROM Highschooler WHERE grade = 9 OR grade = 10"
f2 = "Also count the students in grade 10."
rule("codegen", [q2], w2)
rule("error_correct", [f2], g2)
sql_restate(w2, "How many high schoolers are in grade 9?")
sql_restate(g2, "How many high schoolers are in grade 9 or grade 10?")

# sql-009: missing the ordering, fixed after feedback.
q9 = "Which countries have a life expectancy above 78? List their names sorted by life expectancy in descending order."
w9 = "SELECT Name FROM country WHERE LifeExpectancy > 78"
g9 = "SELECT Name FROM country WHERE LifeExpectancy > 78 ORDER BY LifeExpectancy DESC, Name"
f9 = "Sort the countries by life expectancy from highest to lowest."
rule("codegen", [q9], w9)
rule("error_correct", [f9], g9)
sql_restate(w9, "Which countries have a life expectancy above 78?")
sql_restate(g9, "Which countries have a life expectancy above 78, listed from the highest life expectancy to the lowest?")

# sql-015: two rounds of feedback, still wrong when the user completes.
q15 = "List the names of contestants who received no votes."
w15a = "SELECT contestant_name FROM contestants"
w15b = "SELECT contestant_name FROM contestants WHERE contestant_number IN (SELECT contestant_number FROM votes)"
f15a = "Only keep contestants based on their votes."
f15b = "That is close enough."
rule("codegen", [q15], w15a)
rule("error_correct", [f15a], w15b)
rule("error_correct", [f15b], w15b)
sql_restate(w15a, "What are the names of all contestants?")
sql_restate(w15b, "What are the names of contestants who received at least one vote?")

# sql-013: the user finds the question unclear.
q13 = "What is the area code in which the most voters voted?"
w13 = "SELECT area_code FROM area_code_state LIMIT 1"
rule("codegen", [q13], w13)
sql_restate(w13, "What is one area code?")

# sql-008: vanilla chat answers correctly.
q8 = "What is the total population of countries in Europe?"
g8 = "SELECT sum(Population) FROM country WHERE Continent = 'Europe'"
rule("vanilla_chat", [q8], "Here is a query for that:\n\n" + fence("sql", g8))

# mbpp-4: off by one, fixed after feedback.
q4 = "Write a function to find the kth element in the given array."
w4 = "def kth_element(arr, n, k):\n    return arr[k]"
g4 = "def kth_element(arr, n, k):\n    return arr[k - 1]"
f4 = "Positions are counted from 1, so return the element at index k - 1."
rule("codegen", [q4], fence("python", w4))
rule("error_correct", [f4], fence("python", g4))
rule("describe_explain", ["return arr[k]\n"],
     "The function returns the element of arr at index k, counting positions from zero.")
rule("describe_explain", ["return arr[k]"],
     "The function returns the element of arr at index k, counting positions from zero.")
rule("describe_explain", ["return arr[k - 1]"],
     "The function returns the k-th element of arr, counting positions from one.")

# mbpp-17: right on the first try.
q17 = "Write a function to get the sum of the digits of a non-negative integer."
g17 = "def sum_digits(n):\n    if n == 0:\n        return 0\n    return n % 10 + sum_digits(n // 10)"
rule("codegen", [q17], fence("python", g17))
rule("describe_explain", ["return n % 10 + sum_digits(n // 10)"],
     "The function adds the last digit of n to the digit sum of the remaining digits, stopping at zero.")

# mbpp-20: never converges; the session runs out of time.
q20 = "Write a function to find the largest sum of a contiguous subarray in the given array."
w20 = "def max_sub_array_sum(a, size):\n    return max(a)"
f20 = "Add up neighbouring elements instead of taking the single largest one."
rule("codegen", [q20], fence("python", w20))
rule("error_correct", [f20], fence("python", w20))
rule("describe_explain", ["return max(a)"], "The function returns the largest single element of the list.")

# mbpp-12: the user gives up on it.
q12 = "Write a function to find the number of ways to fill it with 2 x 1 dominoes"
w12 = "def count_ways(n):\n    return n + 1"
rule("codegen", [q12], fence("python", w12))
rule("describe_explain", ["return n + 1"], "The function returns n plus one.")

runs = [
    {"task_id": "sql-001", "mode": "intelliexplain", "feedback": [], "finish": "complete", "expect": "completed_by_user"},
    {"task_id": "sql-002", "mode": "intelliexplain", "feedback": [f2], "finish": "complete", "expect": "completed_by_user"},
    {"task_id": "sql-009", "mode": "intelliexplain", "feedback": [f9], "finish": "complete", "step_ms": 45000, "expect": "completed_by_user"},
    {"task_id": "sql-015", "mode": "intelliexplain", "feedback": [f15a, f15b], "finish": "complete", "step_ms": 40000, "expect": "completed_by_user"},
    {"task_id": "sql-013", "mode": "intelliexplain", "feedback": [], "finish": "skip_unclear", "step_ms": 20000, "expect": "skip_unclear"},
    {"task_id": "sql-008", "mode": "vanilla", "feedback": [], "finish": "complete", "step_ms": 25000, "expect": "completed_by_user"},
    {"task_id": "mbpp-4", "mode": "intelliexplain", "feedback": [f4], "finish": "complete", "step_ms": 50000, "expect": "completed_by_user"},
    {"task_id": "mbpp-17", "mode": "intelliexplain", "feedback": [], "finish": "complete", "step_ms": 35000, "expect": "completed_by_user"},
    {"task_id": "mbpp-20", "mode": "intelliexplain", "feedback": [f20], "finish": "timeout", "step_ms": 60000, "expect": "timeout"},
    {"task_id": "mbpp-12", "mode": "intelliexplain", "feedback": [], "finish": "skip_unsolvable", "step_ms": 90000, "expect": "skip_unsolvable"},
]

(ROOT / "stubs").mkdir(exist_ok=True)
(ROOT / "runs").mkdir(exist_ok=True)
(ROOT / "stubs" / "fixture.rules.json").write_text(json.dumps({"rules": rules}, indent=2) + "\n")
(ROOT / "runs" / "fixture.runs.json").write_text(json.dumps({"runs": runs}, indent=2) + "\n")
