#!/usr/bin/env python3
"""Writes data/corpora/spider_fixture/manifest.jsonl and checks that every gold
query runs against its database and returns at least one row.

    python3 data/scripts/build_sql_manifest.py data/corpora/spider_fixture
"""

import json
import os
import sqlite3
import sys

# (task_id, db_id, difficulty, question, gold)
TASKS = [
    ("sql-001", "network_1", "easy",
     "What is the grade of each high schooler?",
     "SELECT grade FROM Highschooler"),
    ("sql-002", "network_1", "easy",
     "How many high schoolers are there in grade 9 or 10?",
     "SELECT count(*) FROM Highschooler WHERE grade = 9 OR grade = 10"),
    ("sql-003", "network_1", "hard",
     "Show the names of high schoolers who have at least 3 friends.",
     "SELECT T2.name FROM Friend AS T1 JOIN Highschooler AS T2 ON T1.student_id = T2.ID "
     "GROUP BY T1.student_id HAVING count(*) >= 3"),
    ("sql-004", "network_1", "medium",
     "Show all the grades that have at least 4 students, in ascending order.",
     "SELECT grade FROM Highschooler GROUP BY grade HAVING count(*) >= 4 ORDER BY grade ASC"),
    ("sql-005", "network_1", "medium",
     "What are the names of high schoolers who are liked by someone, without duplicates?",
     "SELECT DISTINCT T2.name FROM Likes AS T1 JOIN Highschooler AS T2 ON T1.liked_id = T2.ID"),
    ("sql-006", "network_1", "hard",
     "Count the number of high schoolers who do not have any friends.",
     "SELECT count(*) FROM Highschooler WHERE ID NOT IN "
     "(SELECT student_id FROM Friend UNION SELECT friend_id FROM Friend)"),
    ("sql-007", "world_1", "medium",
     "Count the number of countries for which Spanish is the predominantly spoken language.",
     "SELECT COUNT(*), MAX(Percentage) FROM countrylanguage WHERE LANGUAGE = \"Spanish\" "
     "GROUP BY CountryCode"),
    ("sql-008", "world_1", "easy",
     "What is the total population of countries in Europe?",
     "SELECT sum(Population) FROM country WHERE Continent = 'Europe'"),
    ("sql-009", "world_1", "medium",
     "Which countries have a life expectancy above 78? List their names sorted by life "
     "expectancy in descending order.",
     "SELECT Name FROM country WHERE LifeExpectancy > 78 ORDER BY LifeExpectancy DESC, Name"),
    ("sql-010", "world_1", "medium",
     "What are the names of cities in countries where French is an official language?",
     "SELECT T1.Name FROM city AS T1 JOIN countrylanguage AS T2 ON T1.CountryCode = T2.CountryCode "
     "WHERE T2.Language = 'French' AND T2.IsOfficial = 'T'"),
    ("sql-011", "world_1", "medium",
     "How many distinct languages are spoken in South America?",
     "SELECT count(DISTINCT T2.Language) FROM country AS T1 JOIN countrylanguage AS T2 "
     "ON T1.Code = T2.CountryCode WHERE T1.Continent = 'South America'"),
    ("sql-012", "world_1", "easy",
     "What is the average surface area of countries in each continent?",
     "SELECT Continent, avg(SurfaceArea) FROM country GROUP BY Continent"),
    ("sql-013", "voter_1", "hard",
     "What is the area code in which the most voters voted?",
     "SELECT T1.area_code FROM area_code_state AS T1 JOIN votes AS T2 ON T1.state = T2.state "
     "GROUP BY T1.area_code ORDER BY count(*) DESC LIMIT 1"),
    ("sql-014", "voter_1", "medium",
     "How many votes were cast for each contestant? Show the contestant name and the vote count.",
     "SELECT T1.contestant_name, count(*) FROM contestants AS T1 JOIN votes AS T2 "
     "ON T1.contestant_number = T2.contestant_number GROUP BY T1.contestant_number"),
    ("sql-015", "voter_1", "hard",
     "List the names of contestants who received no votes.",
     "SELECT contestant_name FROM contestants WHERE contestant_number NOT IN "
     "(SELECT contestant_number FROM votes)"),
    ("sql-016", "voter_1", "easy",
     "What are the distinct states with votes, in alphabetical order?",
     "SELECT DISTINCT state FROM votes ORDER BY state"),
    ("sql-017", "apartment_rentals", "medium",
     "What is the most frequent status of bookings?",
     "SELECT booking_status_code FROM Apartment_Bookings GROUP BY booking_status_code "
     "ORDER BY count(*) DESC LIMIT 1"),
    ("sql-018", "apartment_rentals", "easy",
     "What is the average number of rooms of apartments with type code Studio?",
     "SELECT avg(room_count) FROM Apartments WHERE apt_type_code = 'Studio'"),
    ("sql-019", "apartment_rentals", "medium",
     "Show the first names of guests who have a confirmed booking.",
     "SELECT DISTINCT T2.guest_first_name FROM Apartment_Bookings AS T1 JOIN Guests AS T2 "
     "ON T1.guest_id = T2.guest_id WHERE T1.booking_status_code = 'Confirmed'"),
    ("sql-020", "apartment_rentals", "easy",
     "Show the apartment type codes and the number of apartments of each type, sorted by "
     "the number in ascending order.",
     "SELECT apt_type_code, count(*) FROM Apartments GROUP BY apt_type_code ORDER BY count(*) ASC"),
    ("sql-021", "wta_1", "easy",
     "How many different winners both participated in the WTA Championships and were left handed?",
     "SELECT count(DISTINCT winner_id) FROM matches WHERE tourney_name = 'WTA Championships' "
     "AND winner_hand = 'L'"),
    ("sql-022", "wta_1", "hard",
     "Find the first name and country code of the player who won the most matches.",
     "SELECT T1.first_name, T1.country_code FROM players AS T1 JOIN matches AS T2 "
     "ON T1.player_id = T2.winner_id GROUP BY T2.winner_id ORDER BY count(*) DESC LIMIT 1"),
    ("sql-023", "wta_1", "easy",
     "What is the average match duration in minutes for each year?",
     "SELECT year, avg(minutes) FROM matches GROUP BY year"),
]


def main(root: str) -> None:
    lines = []
    for task_id, db_id, difficulty, question, gold in TASKS:
        rel = f"database/{db_id}/{db_id}.sqlite"
        conn = sqlite3.connect(f"file:{os.path.join(root, rel)}?mode=ro", uri=True)
        rows = conn.execute(gold).fetchall()
        conn.close()
        if not rows:
            raise SystemExit(f"{task_id}: gold query returned no rows")
        lines.append(json.dumps({
            "task_id": task_id,
            "language": "sql",
            "question": question,
            "gold_code": gold,
            "context": {"database": rel},
            "difficulty": difficulty,
        }, ensure_ascii=False))
    with open(os.path.join(root, "manifest.jsonl"), "w") as out:
        out.write("\n".join(lines) + "\n")
    print(f"{len(lines)} tasks")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/corpora/spider_fixture")
