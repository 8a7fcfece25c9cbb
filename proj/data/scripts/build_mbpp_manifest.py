#!/usr/bin/env python3
"""Writes data/corpora/mbpp_fixture/manifest.jsonl in the MBPP record layout
(task_id, text, code, test_list) and checks that every gold solution passes
its own asserts.

    python3 data/scripts/build_mbpp_manifest.py data/corpora/mbpp_fixture
"""

import json
import os
import sys

# (task_id, difficulty, text, code, tests)
TASKS = [
    (1, "easy",
     "Write a function to round the given number to the nearest multiple of a specific number.",
     "def round_num(n, m):\n"
     "    a = (n // m) * m\n"
     "    b = a + m\n"
     "    return (b if n - a > b - n else a)\n",
     ["assert round_num(4722, 10) == 4720",
      "assert round_num(1111, 5) == 1110",
      "assert round_num(219, 2) == 218"]),
    (2, "medium",
     "Write a python function to check whether the given number can be represented by "
     "product of two squares or not.",
     "def prod_Square(n):\n"
     "    for i in range(2, n + 1):\n"
     "        if i * i < n + 1:\n"
     "            for j in range(2, n + 1):\n"
     "                if i * i * j * j == n:\n"
     "                    return True\n"
     "    return False\n",
     ["assert prod_Square(25) == False",
      "assert prod_Square(30) == False",
      "assert prod_Square(16) == True"]),
    (3, "hard",
     "Write a python function to find the last digit when factorial of a divides factorial of b.",
     "def compute_Last_Digit(A, B):\n"
     "    variable = 1\n"
     "    if A == B:\n"
     "        return 1\n"
     "    elif (B - A) >= 5:\n"
     "        return 0\n"
     "    else:\n"
     "        for i in range(A + 1, B + 1):\n"
     "            variable = (variable * (i % 10)) % 10\n"
     "        return variable % 10\n",
     ["assert compute_Last_Digit(2, 4) == 2",
      "assert compute_Last_Digit(6, 8) == 6",
      "assert compute_Last_Digit(1, 2) == 2"]),
    (4, "medium",
     "Write a function to find the kth element in the given array.",
     "def kth_element(arr, n, k):\n"
     "    return arr[k - 1]\n",
     ["assert kth_element([12, 3, 5, 7, 19], 5, 2) == 3",
      "assert kth_element([17, 24, 8, 23], 4, 3) == 8",
      "assert kth_element([16, 21, 25, 36, 4], 5, 4) == 36"]),
    (5, "easy",
     "Write a python function to identify non-prime numbers.",
     "import math\n"
     "def is_not_prime(n):\n"
     "    result = False\n"
     "    for i in range(2, int(math.sqrt(n)) + 1):\n"
     "        if n % i == 0:\n"
     "            result = True\n"
     "    return result\n",
     ["assert is_not_prime(2) == False",
      "assert is_not_prime(10) == True",
      "assert is_not_prime(35) == True"]),
    (6, "easy",
     "Write a function to find squares of individual elements in a list using lambda function.",
     "def square_nums(nums):\n"
     "    return list(map(lambda x: x ** 2, nums))\n",
     ["assert square_nums([1, 2, 3, 4, 5]) == [1, 4, 9, 16, 25]",
      "assert square_nums([10, 20, 30]) == [100, 400, 900]",
      "assert square_nums([12, 15]) == [144, 225]"]),
    (7, "medium",
     "Write a python function to find the largest number that can be formed with the given digits.",
     "def find_Max_Num(arr):\n"
     "    arr = sorted(arr, reverse=True)\n"
     "    num = arr[0]\n"
     "    for i in range(1, len(arr)):\n"
     "        num = num * 10 + arr[i]\n"
     "    return num\n",
     ["assert find_Max_Num([1, 2, 3]) == 321",
      "assert find_Max_Num([4, 5, 6, 1]) == 6541",
      "assert find_Max_Num([1, 2, 3, 9]) == 9321"]),
    (8, "hard",
     "Write a function to check if the given number is woodball or not.",
     "def is_woodall(x):\n"
     "    if x % 2 == 0:\n"
     "        return False\n"
     "    if x == 1:\n"
     "        return True\n"
     "    x = x + 1\n"
     "    p = 0\n"
     "    while x % 2 == 0:\n"
     "        x = x // 2\n"
     "        p = p + 1\n"
     "        if p == x:\n"
     "            return True\n"
     "    return False\n",
     ["assert is_woodall(383) == True",
      "assert is_woodall(254) == False",
      "assert is_woodall(200) == False"]),
    (9, "medium",
     "Write a python function to remove first and last occurrence of a given character from the string.",
     "def remove_Occ(s, ch):\n"
     "    first = s.find(ch)\n"
     "    if first != -1:\n"
     "        s = s[:first] + s[first + 1:]\n"
     "    last = s.rfind(ch)\n"
     "    if last != -1:\n"
     "        s = s[:last] + s[last + 1:]\n"
     "    return s\n",
     ["assert remove_Occ(\"hello\", \"l\") == \"heo\"",
      "assert remove_Occ(\"abcda\", \"a\") == \"bcd\"",
      "assert remove_Occ(\"PHP\", \"P\") == \"H\""]),
    (10, "easy",
     "Write a function to find the similar elements from the given two tuple lists.",
     "def similar_elements(test_tup1, test_tup2):\n"
     "    return tuple(sorted(set(test_tup1) & set(test_tup2)))\n",
     ["assert similar_elements((3, 4, 5, 6), (5, 7, 4, 10)) == (4, 5)",
      "assert similar_elements((1, 2, 3, 4), (5, 4, 3, 7)) == (3, 4)",
      "assert similar_elements((11, 12, 14, 13), (17, 15, 14, 13)) == (13, 14)"]),
    (11, "easy",
     "Write a function to find the largest integers from a given list of numbers using heap queue algorithm.",
     "import heapq as hq\n"
     "def heap_queue_largest(nums, n):\n"
     "    return hq.nlargest(n, nums)\n",
     ["assert heap_queue_largest([25, 35, 22, 85, 14, 65, 75, 22, 58], 3) == [85, 75, 65]",
      "assert heap_queue_largest([25, 35, 22, 85, 14, 65, 75, 22, 58], 2) == [85, 75]",
      "assert heap_queue_largest([25, 35, 22, 85, 14, 65, 75, 22, 58], 5) == [85, 75, 65, 58, 35]"]),
    (12, "hard",
     "Write a function to find the number of ways to fill it with 2 x 1 dominoes for the given 3 x n board.",
     "def count_ways(n):\n"
     "    A = [0] * (n + 1)\n"
     "    B = [0] * (n + 1)\n"
     "    A[0] = 1\n"
     "    A[1] = 0\n"
     "    B[0] = 0\n"
     "    B[1] = 1\n"
     "    for i in range(2, n + 1):\n"
     "        A[i] = A[i - 2] + 2 * B[i - 1]\n"
     "        B[i] = A[i - 1] + B[i - 2]\n"
     "    return A[n]\n",
     ["assert count_ways(2) == 3",
      "assert count_ways(8) == 153",
      "assert count_ways(12) == 2131"]),
    (13, "medium",
     "Write a python function to check whether the two numbers differ at one bit position only or not.",
     "def differ_At_One_Bit_Pos(a, b):\n"
     "    x = a ^ b\n"
     "    return x != 0 and (x & (x - 1)) == 0\n",
     ["assert differ_At_One_Bit_Pos(13, 9) == True",
      "assert differ_At_One_Bit_Pos(15, 8) == False",
      "assert differ_At_One_Bit_Pos(2, 4) == False"]),
    (14, "easy",
     "Write a function to find all words which are at least 4 characters long in a string by using regex.",
     "import re\n"
     "def find_char_long(text):\n"
     "    return re.findall(r\"\\b\\w{4,}\\b\", text)\n",
     ["assert find_char_long('Please move back to stream') == ['Please', 'move', 'back', 'stream']",
      "assert find_char_long('Jing Eco and Tech') == ['Jing', 'Tech']",
      "assert find_char_long('Jhingai wulu road Zone 3') == ['Jhingai', 'wulu', 'road', 'Zone']"]),
    (15, "medium",
     "Write a python function to find the minimum number of rotations required to get the same string.",
     "def find_Rotations(s):\n"
     "    tmp = s + s\n"
     "    n = len(s)\n"
     "    for i in range(1, n + 1):\n"
     "        if tmp[i:i + n] == s:\n"
     "            return i\n"
     "    return n\n",
     ["assert find_Rotations(\"aaaa\") == 1",
      "assert find_Rotations(\"ab\") == 2",
      "assert find_Rotations(\"abc\") == 3"]),
    (16, "easy",
     "Write a function to get the n smallest items from a dataset.",
     "import heapq\n"
     "def small_nnum(list1, n):\n"
     "    return heapq.nsmallest(n, list1)\n",
     ["assert small_nnum([10, 20, 50, 70, 90, 20, 50, 40, 60, 80, 100], 2) == [10, 20]",
      "assert small_nnum([10, 20, 50, 70, 90, 20, 50, 40, 60, 80, 100], 5) == [10, 20, 20, 40, 50]",
      "assert small_nnum([10, 20, 50, 70, 90, 20, 50, 40, 60, 80, 100], 3) == [10, 20, 20]"]),
    (17, "medium",
     "Write a function to get the sum of the digits of a non-negative integer.",
     "def sum_digits(n):\n"
     "    if n == 0:\n"
     "        return 0\n"
     "    return n % 10 + sum_digits(n // 10)\n",
     ["assert sum_digits(345) == 12",
      "assert sum_digits(12) == 3",
      "assert sum_digits(97) == 16"]),
    (18, "easy",
     "Write a python function to count the occurrence of a given character in a string.",
     "def count_char(string, char):\n"
     "    count = 0\n"
     "    for c in string:\n"
     "        if c == char:\n"
     "            count += 1\n"
     "    return count\n",
     ["assert count_char(\"Python\", 'o') == 1",
      "assert count_char(\"little\", 't') == 2",
      "assert count_char(\"assert\", 's') == 2"]),
    (19, "easy",
     "Write a function to convert a tuple to a string.",
     "def tup_string(tup1):\n"
     "    return ''.join(tup1)\n",
     ["assert tup_string(('e', 'x', 'e', 'r', 'c', 'i', 's', 'e', 's')) == \"exercises\"",
      "assert tup_string(('p', 'y', 't', 'h', 'o', 'n')) == \"python\"",
      "assert tup_string(('p', 'r', 'o', 'g', 'r', 'a', 'm')) == \"program\""]),
    (20, "hard",
     "Write a function to find the largest sum of a contiguous subarray in the given array.",
     "def max_sub_array_sum(a, size):\n"
     "    max_so_far = a[0]\n"
     "    max_ending_here = 0\n"
     "    for i in range(0, size):\n"
     "        max_ending_here = max_ending_here + a[i]\n"
     "        if max_so_far < max_ending_here:\n"
     "            max_so_far = max_ending_here\n"
     "        if max_ending_here < 0:\n"
     "            max_ending_here = 0\n"
     "    return max_so_far\n",
     ["assert max_sub_array_sum([-2, -3, 4, -1, -2, 1, 5, -3], 8) == 7",
      "assert max_sub_array_sum([-3, -4, 5, -2, -3, 2, 6, -4], 8) == 8",
      "assert max_sub_array_sum([-4, -5, 6, -3, -4, 3, 7, -5], 8) == 10"]),
    (21, "medium",
     "Write a python function to find the first repeated character in a given string.",
     "def first_repeated_char(str1):\n"
     "    seen = set()\n"
     "    for c in str1:\n"
     "        if c in seen:\n"
     "            return c\n"
     "        seen.add(c)\n"
     "    return \"None\"\n",
     ["assert first_repeated_char(\"abcabc\") == \"a\"",
      "assert first_repeated_char(\"abc\") == \"None\"",
      "assert first_repeated_char(\"123123\") == \"1\""]),
    (22, "hard",
     "Write a function to find the binomial coefficient.",
     "def binomial_Coeff(n, k):\n"
     "    if k > n:\n"
     "        return 0\n"
     "    if k == 0 or k == n:\n"
     "        return 1\n"
     "    return binomial_Coeff(n - 1, k - 1) + binomial_Coeff(n - 1, k)\n",
     ["assert binomial_Coeff(5, 2) == 10",
      "assert binomial_Coeff(4, 3) == 4",
      "assert binomial_Coeff(3, 2) == 3"]),
]


def main(root: str) -> None:
    lines = []
    for task_id, difficulty, text, code, tests in TASKS:
        for case in tests:
            scope = {"__name__": "__main__"}
            exec(compile(code + "\n" + case, f"task-{task_id}", "exec"), scope)
        lines.append(json.dumps({
            "task_id": task_id,
            "text": text,
            "code": code,
            "test_list": tests,
            "difficulty": difficulty,
        }, ensure_ascii=False))
    os.makedirs(root, exist_ok=True)
    with open(os.path.join(root, "manifest.jsonl"), "w") as out:
        out.write("\n".join(lines) + "\n")
    print(f"{len(lines)} tasks")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/corpora/mbpp_fixture")
