def is_number(text):
    if len(text) == 0:
        return False
    start = 0
    if text[0] == "-":
        if len(text) == 1:
            return False
        start = 1
    digits = 0
    dots = 0
    i = start
    while i < len(text):
        ch = text[i]
        if ch == ".":
            dots = dots + 1
            if dots > 1:
                return False
        else:
            if ch < "0" or ch > "9":
                return False
            digits = digits + 1
        i = i + 1
    return digits > 0

def rain():
    total = 0
    count = 0
    while True:
        line = input("Rainfall for the day (-999 quits): ")
        if line == "-999":
            break
        if is_number(line):
            value = float(line)
            if value >= 0:
                total += value
                count += 1
    if count > 0:
        return total / count
    return 0

if __name__ == "__main__":
    print(rain())
